// maxitive command-line front end: load distributions, transforms and
// models from JSON, run axiom checks / pushforwards / profiles / distances /
// tropical updates, and emit CSV or JSON plus a deterministic run manifest.

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "maxitive/io.hpp"
#include "maxitive/maxitive.hpp"

namespace fs = std::filesystem;
using json = maxitive::io::json;
using namespace maxitive;

namespace {

// exit codes: 0 success, 2 parse, 3 validation, 4 optimizer, 5 io
constexpr int exit_ok = 0;
constexpr int exit_parse = 2;
constexpr int exit_validation = 3;
constexpr int exit_optimizer = 4;
constexpr int exit_io = 5;

struct Options {
    std::string input;
    std::string transform;
    std::string output;
    std::string t_grid;
    std::string target_grid;
    std::string map_name;
    std::string mode = "input";
    std::string format = "csv";
    std::uint64_t seed = 0;
    std::uint64_t trials = 200;
    int starts = 5;
    int steps = 0;
    double xtol = 1e-8;
    double ftol = 1e-10;
    double ctol = 1e-6;
    double scale = 1.0;
    bool normalize_first = false;
    bool cold_start = false;
};

struct RunContext {
    std::string subcommand;
    Options opts;
    std::vector<io::ManifestInput> inputs;
    std::vector<std::string> outputs;
};

std::string load_input(RunContext& ctx, const std::string& path) {
    std::string contents = io::read_file(path);
    ctx.inputs.push_back({path, contents});
    return contents;
}

void emit(RunContext& ctx, const std::string& contents) {
    if (ctx.opts.output.empty()) {
        std::cout << contents;
        return;
    }
    io::write_file(ctx.opts.output, contents);
    ctx.outputs.push_back(fs::path(ctx.opts.output).filename().string());
}

json options_record(const RunContext& ctx) {
    const Options& o = ctx.opts;
    json rec{{"seed", o.seed}, {"format", o.format}};
    if (!o.t_grid.empty()) {
        rec["t_grid"] = o.t_grid;
        rec["starts"] = o.starts;
        rec["xtol"] = o.xtol;
        rec["ftol"] = o.ftol;
        rec["ctol"] = o.ctol;
        rec["cold_start"] = o.cold_start;
    }
    if (o.mode != "input") rec["mode"] = o.mode;
    if (o.normalize_first) rec["normalize"] = true;
    if (o.scale != 1.0) rec["scale"] = o.scale;
    if (o.trials != 200) rec["trials"] = o.trials;
    if (o.steps != 0) rec["steps"] = o.steps;
    if (!o.map_name.empty()) {
        rec["map"] = o.map_name;
        rec["target_grid"] = o.target_grid;
    }
    return rec;
}

void finish(RunContext& ctx) {
    if (ctx.opts.output.empty()) return;  // stdout runs leave no manifest
    const json manifest = io::make_manifest(ctx.subcommand, ctx.inputs,
                                            ctx.opts.seed, options_record(ctx),
                                            ctx.outputs);
    const fs::path dir = fs::path(ctx.opts.output).parent_path();
    const fs::path path = dir / "run_manifest.json";
    io::write_file(path.string(), manifest.dump(2) + "\n");
}

std::vector<double> parse_grid_spec(const std::string& spec) {
    // "lo:hi:count", endpoints included
    double lo = 0, hi = 0;
    int count = 0;
    char trailing;
    if (std::sscanf(spec.c_str(), "%lf:%lf:%d%c", &lo, &hi, &count, &trailing) != 3 ||
        count < 2 || !(lo < hi))
        throw maxitive::parse_error("bad grid spec '" + spec +
                                    "' (expected lo:hi:count with lo < hi, count >= 2)");
    std::vector<double> grid(static_cast<std::size_t>(count));
    for (int i = 0; i < count; ++i)
        grid[static_cast<std::size_t>(i)] =
            lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(count - 1);
    return grid;
}

std::vector<GridAxis> parse_target_grid(const std::string& spec) {
    std::vector<GridAxis> axes;
    std::size_t pos = 0;
    while (pos <= spec.size()) {
        const std::size_t next = spec.find(';', pos);
        const std::string part = spec.substr(pos, next == std::string::npos
                                                      ? std::string::npos
                                                      : next - pos);
        double lo = 0, hi = 0;
        int points = 0;
        char trailing;
        if (std::sscanf(part.c_str(), "%lf:%lf:%d%c", &lo, &hi, &points, &trailing) != 3)
            throw maxitive::parse_error("bad target grid '" + part + "'");
        axes.push_back(GridAxis{lo, hi, points});
        if (next == std::string::npos) break;
        pos = next + 1;
    }
    return axes;
}

NumericMap builtin_numeric_map(const std::string& name,
                               std::vector<GridAxis> target) {
    NumericMap map;
    map.name = name;
    map.target = std::move(target);
    if (name == "sum") {
        map.fn = [](std::span<const double> x) {
            double s = 0;
            for (double v : x) s += v;
            return std::vector<double>{s};
        };
    } else if (name == "sumsq") {
        map.fn = [](std::span<const double> x) {
            double s = 0;
            for (double v : x) s += v * v;
            return std::vector<double>{s};
        };
    } else if (name.rfind("affine:", 0) == 0) {
        double a = 0, b = 0;
        if (std::sscanf(name.c_str(), "affine:%lf:%lf", &a, &b) != 2)
            throw maxitive::parse_error("bad map spec '" + name +
                                        "' (expected affine:A:B)");
        map.fn = [a, b](std::span<const double> x) {
            return std::vector<double>{a * x[0] + b};
        };
    } else {
        throw maxitive::parse_error("unknown map '" + name +
                                    "' (built-ins: sum, sumsq, affine:A:B)");
    }
    return map;
}

json distribution_report(const DiscreteDistribution& d) {
    json weights = json::object();
    for (std::size_t i = 0; i < d.size(); ++i)
        weights[d.labels()[i]] = d.weights()[i];
    return json{{"weights", std::move(weights)}, {"argmax", d.argmax()}};
}

json axiom_report_json(const DiscreteDistribution& dist, const AxiomReport& r) {
    auto law = [](const LawResult& l) {
        json j{{"pass", l.pass}};
        if (!l.pass) j["counterexample"] = l.counterexample;
        return j;
    };
    return json{{"mode", mode_name(dist.mode())},
                {"empty_law", law(r.empty_law)},
                {"full_law", law(r.full_law)},
                {"union_law", law(r.union_law)},
                {"pairs_checked", r.pairs_checked},
                {"exhaustive", r.exhaustive},
                {"all_pass", r.all_pass()}};
}

// --- subcommands -----------------------------------------------------------

int run_axioms(RunContext& ctx) {
    auto doc = io::parse_json(load_input(ctx, ctx.opts.input), ctx.opts.input);
    DiscreteDistribution dist = io::discrete_from_json(doc);
    if (ctx.opts.normalize_first) dist = normalize(dist);
    const AxiomReport report = check_axioms(dist, ctx.opts.trials, ctx.opts.seed);
    emit(ctx, axiom_report_json(dist, report).dump(2) + "\n");
    finish(ctx);
    return report.all_pass() ? exit_ok : exit_validation;
}

int run_pushforward_both(RunContext& ctx, const json& doc, const TransformSpec& T);

int run_pushforward(RunContext& ctx) {
    auto doc = io::parse_json(load_input(ctx, ctx.opts.input), ctx.opts.input);

    TransformSpec T = Projection{};
    if (!ctx.opts.map_name.empty()) {
        if (ctx.opts.target_grid.empty())
            throw maxitive::parse_error("--map requires --target-grid");
        T = builtin_numeric_map(ctx.opts.map_name,
                                parse_target_grid(ctx.opts.target_grid));
    } else if (!ctx.opts.transform.empty()) {
        T = io::transform_from_json(
            io::parse_json(load_input(ctx, ctx.opts.transform), ctx.opts.transform));
    } else {
        throw maxitive::parse_error("pushforward needs --transform or --map");
    }

    if (ctx.opts.mode == "both") return run_pushforward_both(ctx, doc, T);

    const bool is_grid = doc.contains("axes");
    if (is_grid) {
        GridDensity g = io::grid_from_json(doc);
        if (ctx.opts.mode != "input")
            g.mode = mode_from_name(ctx.opts.mode);
        const GridDensity image = pushforward(g, T);
        emit(ctx, io::grid_to_json(image).dump(2) + "\n");
    } else {
        DiscreteDistribution d = io::discrete_from_json(doc);
        if (ctx.opts.mode != "input")
            d = DiscreteDistribution(d.labels(), d.weights(),
                                     mode_from_name(ctx.opts.mode));
        const DiscreteDistribution image = pushforward(d, T);
        emit(ctx, ctx.opts.format == "csv"
                      ? io::discrete_to_csv(image)
                      : io::discrete_to_json(image).dump(2) + "\n");
    }
    finish(ctx);
    return exit_ok;
}

json compare_modes_report(const DiscreteDistribution& base, const TransformSpec& T) {
    const DiscreteDistribution additive(base.labels(), base.weights(), Mode::additive);
    const DiscreteDistribution maxitive_(base.labels(), base.weights(), Mode::maxitive);
    const auto add_image = pushforward(additive, T);
    const auto max_image = pushforward(maxitive_, T);
    return json{{"source", distribution_report(base)},
                {"additive_image", distribution_report(add_image)},
                {"maxitive_image", distribution_report(max_image)},
                {"argmax_flip", add_image.argmax() != max_image.argmax()}};
}

int run_pushforward_both(RunContext& ctx, const json& doc, const TransformSpec& T) {
    if (doc.contains("axes"))
        throw maxitive::validation_error("--mode both supports discrete inputs only");
    const DiscreteDistribution base = io::discrete_from_json(doc);
    emit(ctx, compare_modes_report(base, T).dump(2) + "\n");
    finish(ctx);
    return exit_ok;
}

int run_compare_modes(RunContext& ctx) {
    auto doc = io::parse_json(load_input(ctx, ctx.opts.input), ctx.opts.input);
    if (ctx.opts.transform.empty())
        throw maxitive::parse_error("compare-modes needs --transform");
    const TransformSpec T = io::transform_from_json(
        io::parse_json(load_input(ctx, ctx.opts.transform), ctx.opts.transform));
    const DiscreteDistribution base = io::discrete_from_json(doc);
    emit(ctx, compare_modes_report(base, T).dump(2) + "\n");
    finish(ctx);
    return exit_ok;
}

int run_suspects_demo(RunContext& ctx) {
    const auto base = models::suspects(Mode::additive);
    emit(ctx, compare_modes_report(base, models::suspects_hats()).dump(2) + "\n");
    finish(ctx);
    return exit_ok;
}

LikelihoodModel model_from_json(const json& doc) {
    if (!doc.is_object() || !doc.contains("model") || !doc["model"].is_string())
        throw maxitive::parse_error("model document needs a 'model' name");
    const std::string name = doc["model"].get<std::string>();

    auto box_from = [&](std::size_t expected) {
        if (!doc.contains("box") || !doc["box"].is_array() ||
            doc["box"].size() != expected)
            throw maxitive::parse_error("model needs a 'box' with " +
                                        std::to_string(expected) + " axes");
        std::vector<Interval> box;
        for (const auto& iv : doc["box"]) {
            if (!iv.is_array() || iv.size() != 2)
                throw maxitive::parse_error("box axes are [lower, upper] pairs");
            box.push_back(Interval{iv[0].get<double>(), iv[1].get<double>()});
        }
        return box;
    };
    auto numbers = [&](const char* field) {
        if (!doc.contains(field) || !doc[field].is_array())
            throw maxitive::parse_error(std::string("model needs '") + field + "'");
        std::vector<double> v;
        for (const auto& x : doc[field]) v.push_back(x.get<double>());
        return v;
    };

    if (name == "normal") {
        auto box = box_from(2);
        return models::normal_model(numbers("data"), box[0], box[1]);
    }
    if (name == "quadratic") {
        if (!doc.contains("precision") || !doc["precision"].is_array())
            throw maxitive::parse_error("quadratic model needs 'precision'");
        std::vector<std::vector<double>> precision;
        for (const auto& row : doc["precision"]) {
            std::vector<double> r;
            for (const auto& x : row) r.push_back(x.get<double>());
            precision.push_back(std::move(r));
        }
        auto mean = numbers("mean");
        return models::gaussian_quadratic(mean, precision, box_from(mean.size()));
    }
    if (name == "logistic") {
        if (!doc.contains("sigma") || !doc["sigma"].is_number())
            throw maxitive::parse_error("logistic model needs 'sigma'");
        return models::logistic_curve(numbers("inputs"), numbers("responses"),
                                      doc["sigma"].get<double>(), box_from(2));
    }
    throw maxitive::parse_error("unknown model '" + name +
                                "' (built-ins: normal, quadratic, logistic)");
}

InterestFunction interest_from_json(const json& doc) {
    if (!doc.contains("interest") || !doc["interest"].is_object())
        throw maxitive::parse_error("model document needs an 'interest' object");
    const json& j = doc["interest"];
    if (j.contains("coordinate")) return Coordinate{j["coordinate"].get<int>()};
    if (j.contains("linear")) {
        LinearCombination lc;
        for (const auto& x : j["linear"]) lc.coefficients.push_back(x.get<double>());
        return lc;
    }
    if (j.contains("map")) {
        const std::string name = j["map"].get<std::string>();
        GeneralMap gm;
        gm.name = name;
        if (name == "sum") {
            gm.fn = [](std::span<const double> x) {
                double s = 0;
                for (double v : x) s += v;
                return s;
            };
        } else if (name == "sumsq") {
            gm.fn = [](std::span<const double> x) {
                double s = 0;
                for (double v : x) s += v * v;
                return s;
            };
        } else {
            throw maxitive::parse_error("unknown interest map '" + name + "'");
        }
        return gm;
    }
    throw maxitive::parse_error(
        "'interest' needs 'coordinate', 'linear' or 'map'");
}

int run_profile(RunContext& ctx) {
    auto doc = io::parse_json(load_input(ctx, ctx.opts.input), ctx.opts.input);
    const LikelihoodModel model = model_from_json(doc);
    const InterestFunction interest = interest_from_json(doc);
    if (ctx.opts.t_grid.empty())
        throw maxitive::parse_error("profile needs --t-grid lo:hi:count");
    const std::vector<double> grid = parse_grid_spec(ctx.opts.t_grid);

    ProfileOptions popts;
    popts.starts = ctx.opts.starts;
    popts.xtol = ctx.opts.xtol;
    popts.ftol = ctx.opts.ftol;
    popts.ctol = ctx.opts.ctol;
    popts.seed = ctx.opts.seed;
    popts.warm_start = !ctx.opts.cold_start;

    const ProfileCurve curve = profile(model, interest, grid, popts);
    emit(ctx, ctx.opts.format == "json" ? io::curve_to_json(curve).dump(2) + "\n"
                                        : io::curve_to_csv(curve));
    finish(ctx);
    return exit_ok;
}

int run_distance(RunContext& ctx) {
    auto doc = io::parse_json(load_input(ctx, ctx.opts.input), ctx.opts.input);
    const DiscreteDistribution dist = io::discrete_from_json(doc);
    // pairwise table; the optional --scale factor is a pure reporting
    // multiplier, the distance itself is fixed to natural log
    std::string csv = "theta_1,theta_2,distance\n";
    for (std::size_t i = 0; i < dist.size(); ++i) {
        for (std::size_t j = i + 1; j < dist.size(); ++j) {
            const double wi = dist.weights()[i], wj = dist.weights()[j];
            std::string cell;
            if (wi == 0.0 && wj == 0.0)
                cell = "nan";  // undefined pair, kept visible in the table
            else
                cell = io::format_double(ctx.opts.scale *
                                         weight_distance(wi, wj).value);
            csv += dist.labels()[i] + "," + dist.labels()[j] + "," + cell + "\n";
        }
    }
    emit(ctx, csv);
    finish(ctx);
    return exit_ok;
}

int run_tropical_bayes(RunContext& ctx) {
    auto doc = io::parse_json(load_input(ctx, ctx.opts.input), ctx.opts.input);
    if (!doc.contains("prior") || !doc.contains("evidence"))
        throw maxitive::parse_error("document needs 'prior' and 'evidence'");
    CostMeasure posterior = io::costs_from_json(doc["prior"]);
    if (doc["evidence"].is_array()) {
        for (const auto& e : doc["evidence"])
            posterior = tropical_bayes(posterior, io::costs_from_json(e));
    } else {
        posterior = tropical_bayes(posterior, io::costs_from_json(doc["evidence"]));
    }
    emit(ctx, io::costs_to_json(posterior).dump(2) + "\n");
    finish(ctx);
    return exit_ok;
}

int run_bellman(RunContext& ctx) {
    auto doc = io::parse_json(load_input(ctx, ctx.opts.input), ctx.opts.input);
    const TropicalMatrix M = io::matrix_from_json(doc);
    CostMeasure v0 = [&] {
        if (doc.contains("initial") && doc["initial"].is_array()) {
            std::vector<double> costs;
            std::vector<std::string> labels;
            for (const auto& c : doc["initial"]) {
                labels.push_back("n" + std::to_string(labels.size()));
                costs.push_back(io::number_or_inf(c, "initial cost"));
            }
            return CostMeasure::over_labels(std::move(labels), std::move(costs));
        }
        if (doc.contains("initial"))
            return io::costs_from_json(doc["initial"]);
        throw maxitive::parse_error("document needs 'initial' costs");
    }();

    json result;
    if (ctx.opts.steps > 0) {
        CostMeasure v = v0;
        for (int k = 0; k < ctx.opts.steps; ++k) v = bellman_step(M, v);
        result = json{{"costs", io::costs_to_json(v)["costs"]},
                      {"iterations", ctx.opts.steps},
                      {"converged", json(nullptr)}};
    } else {
        const BellmanSolution sol = bellman_solve(M, v0);
        result = json{{"costs", io::costs_to_json(sol.costs)["costs"]},
                      {"iterations", sol.iterations},
                      {"converged", sol.converged}};
    }
    emit(ctx, result.dump(2) + "\n");
    finish(ctx);
    return exit_ok;
}

void report_error(const std::string& cls, int code, const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    const json record{
        {"error", {{"class", cls}, {"message", e.what()}, {"exit_code", code}}}};
    std::cerr << record.dump() << "\n";
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"possibilistic / probabilistic measure toolkit"};
    app.require_subcommand(1);

    Options opts;
    RunContext ctx;

    auto add_common = [&](CLI::App* sub, bool needs_input = true) {
        if (needs_input)
            sub->add_option("--input", opts.input, "input JSON document")->required();
        sub->add_option("--output", opts.output,
                        "output file (stdout when omitted; a run_manifest.json "
                        "is written next to file outputs)");
        sub->add_option("--seed", opts.seed, "random seed");
        sub->add_option("--format", opts.format, "output format")
            ->check(CLI::IsMember({"csv", "json"}));
    };

    auto* axioms = app.add_subcommand("axioms", "check the measure axioms");
    add_common(axioms);
    axioms->add_option("--trials", opts.trials, "random subset pairs to sample");
    axioms->add_flag("--normalize", opts.normalize_first,
                     "normalize the input before checking");

    auto* push = app.add_subcommand("pushforward",
                                    "push a distribution through a transform");
    add_common(push);
    push->add_option("--transform", opts.transform, "transform JSON document");
    push->add_option("--map", opts.map_name,
                     "built-in numeric map (sum, sumsq, affine:A:B)");
    push->add_option("--target-grid", opts.target_grid,
                     "target grid lo:hi:points[;lo:hi:points...] for --map");
    push->add_option("--mode", opts.mode, "override the document's semiring mode")
        ->check(CLI::IsMember({"input", "additive", "maxitive", "both"}));

    auto* cmp = app.add_subcommand("compare-modes",
                                   "run both semirings and report the argmax flip");
    add_common(cmp);
    cmp->add_option("--transform", opts.transform, "transform JSON document")
        ->required();

    auto* prof = app.add_subcommand("profile", "profile likelihood over a t grid");
    add_common(prof);
    prof->add_option("--t-grid", opts.t_grid, "t grid as lo:hi:count")->required();
    prof->add_option("--starts", opts.starts, "multi-start count");
    prof->add_option("--xtol", opts.xtol, "simplex tolerance");
    prof->add_option("--ftol", opts.ftol, "objective tolerance");
    prof->add_option("--ctol", opts.ctol, "constraint tolerance");
    prof->add_flag("--cold-start", opts.cold_start,
                   "independent (parallel) starts instead of sequential warm starts");

    auto* dist = app.add_subcommand("distance", "pairwise log-likelihood distances");
    add_common(dist);
    dist->add_option("--scale", opts.scale, "reporting scale factor");

    auto* bayes = app.add_subcommand("tropical-bayes",
                                     "prior cost + evidence cost, renormalized");
    add_common(bayes);

    auto* bellman = app.add_subcommand("bellman", "Bellman chain value iteration");
    add_common(bellman);
    bellman->add_option("--steps", opts.steps,
                        "fixed number of steps (default: iterate to fixed point)");

    auto* demo = app.add_subcommand("suspects-demo",
                                    "built-in three-suspects example");
    add_common(demo, false);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);  // --help
        app.exit(e);
        return exit_parse;
    }

    ctx.opts = opts;
    try {
        if (axioms->parsed()) {
            ctx.subcommand = "axioms";
            return run_axioms(ctx);
        }
        if (push->parsed()) {
            ctx.subcommand = "pushforward";
            return run_pushforward(ctx);
        }
        if (cmp->parsed()) {
            ctx.subcommand = "compare-modes";
            return run_compare_modes(ctx);
        }
        if (prof->parsed()) {
            ctx.subcommand = "profile";
            return run_profile(ctx);
        }
        if (dist->parsed()) {
            ctx.subcommand = "distance";
            return run_distance(ctx);
        }
        if (bayes->parsed()) {
            ctx.subcommand = "tropical-bayes";
            return run_tropical_bayes(ctx);
        }
        if (bellman->parsed()) {
            ctx.subcommand = "bellman";
            return run_bellman(ctx);
        }
        ctx.subcommand = "suspects-demo";
        return run_suspects_demo(ctx);
    } catch (const maxitive::parse_error& e) {
        report_error("parse", exit_parse, e);
        return exit_parse;
    } catch (const maxitive::optimizer_error& e) {
        report_error("optimizer", exit_optimizer, e);
        return exit_optimizer;
    } catch (const maxitive::io_error& e) {
        report_error("io", exit_io, e);
        return exit_io;
    } catch (const maxitive::validation_error& e) {
        report_error("validation", exit_validation, e);
        return exit_validation;
    } catch (const std::exception& e) {
        report_error("validation", exit_validation, e);
        return exit_validation;
    }
}
