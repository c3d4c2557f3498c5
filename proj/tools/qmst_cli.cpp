// qmst: q-dependent detrended correlation networks from the command line.
//
//   qmst synth      generate ARFIMA / correlated-pair panels
//   qmst transform  log-returns and shuffle / gaussianize / sign / amplitude shuffles
//   qmst rho        rho_q and distance matrices
//   qmst tree       minimum spanning tree, optional significance filtering
//   qmst audit      triangle-inequality audit over an (s, q) grid
//   qmst thresholds surrogate significance thresholds
//   qmst compare    Pearson vs rho_q similarity table, or common edges of two trees
//   qmst run        full pipeline from a config file

#include "qmst/config.hpp"
#include "qmst/csv.hpp"
#include "qmst/error.hpp"
#include "qmst/fluct.hpp"
#include "qmst/graph_io.hpp"
#include "qmst/ingest.hpp"
#include "qmst/pipeline.hpp"
#include "qmst/rng.hpp"
#include "qmst/rho.hpp"
#include "qmst/significance.hpp"
#include "qmst/similarity.hpp"
#include "qmst/synth.hpp"
#include "qmst/tree.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <limits>
#include <optional>

namespace {

using namespace qmst;

void emit(const std::string& path, const std::string& content) {
    if (path.empty() || path == "-") {
        std::cout << content;
    } else {
        write_text(path, content);
    }
}

struct SynthArgs {
    std::string kind = "arfima";
    std::size_t n = 10;
    std::size_t length = 10000;
    double d = 0.3;
    std::size_t truncation = 10000;
    double gamma = 0.5;
    double dof = 3.0;
    std::uint64_t seed = 0;
    std::string out;
    unsigned threads = 0;
};

void run_synth(const SynthArgs& a) {
    std::optional<SeriesPanel> panel;
    if (a.kind == "arfima") {
        panel.emplace(arfima_panel(a.n, ArfimaParams{a.d, a.length, a.truncation, a.seed}, a.threads));
    } else if (a.kind == "pairs") {
        panel.emplace(correlated_pair_panel(a.n, CorrelatedPairParams{a.gamma, a.length, a.seed}));
    } else if (a.kind == "heavy-pairs") {
        panel.emplace(heavy_tailed_pair_panel(a.n, CorrelatedPairParams{a.gamma, a.length, a.seed}, a.dof));
    } else if (a.kind == "gaussian") {
        panel.emplace(gaussian_panel(a.n, a.length, a.seed));
    } else {
        throw ValidationError("unknown synth kind '" + a.kind + "'");
    }
    write_series_panel(a.out, *panel);
}

struct TransformArgs {
    std::string in;
    std::string out;
    bool prices = false;
    std::size_t dt = 1;
    bool drop_gaps = false;
    std::vector<std::string> chain;
    std::uint64_t seed = 0;
};

void run_transform(const TransformArgs& a) {
    std::optional<SeriesPanel> panel;
    if (a.prices) {
        panel.emplace(log_returns(read_price_panel(a.in), ReturnOptions{a.dt, a.drop_gaps}));
    } else {
        panel.emplace(aggregate_returns(read_series_panel(a.in), a.dt));
    }
    for (std::size_t k = 0; k < a.chain.size(); ++k) {
        panel.emplace(apply_transform(*panel, TransformSpec::parse(a.chain[k], a.chain.size() == 1 ? a.seed : derive_seed(a.seed, k))));
    }
    write_series_panel(a.out, *panel);
}

struct RhoArgs {
    std::string in;
    std::size_t scale = 20;
    double q = 2.0;
    unsigned order = 2;
    std::string out;
    std::string distance;
    std::string dump_boxes;
    unsigned threads = 0;
    bool no_cache = false;
};

void dump_boxes(const std::string& path, const SeriesPanel& panel, std::size_t scale, double q, unsigned order) {
    const auto boxes = partition(panel.length(), scale);
    const PolynomialDetrender detrender(scale, order);
    std::vector<BoxResiduals> res;
    for (std::size_t i = 0; i < panel.size(); ++i) res.emplace_back(panel.series(i), boxes, detrender);
    std::string out = "x,y,s,q,nu,f2,term\n";
    for (std::size_t i = 0; i < panel.size(); ++i) {
        for (std::size_t j = i; j < panel.size(); ++j) {
            const auto f2 = res[i].moments_with(res[j]);
            for (std::size_t nu = 0; nu < f2.size(); ++nu) {
                const double one = f2[nu];
                out += csv::join({panel.label(i), panel.label(j), std::to_string(scale), csv::format_exact(q),
                                  std::to_string(nu), csv::format_exact(one),
                                  csv::format_exact(q_average(std::span<const double>(&one, 1), q))});
                out += '\n';
            }
        }
    }
    write_text(path, out);
}

void run_rho(const RhoArgs& a) {
    const auto panel = read_series_panel(a.in);
    for (const auto& w : DetrendConfig{a.order, {a.scale}, {a.q}}.validate(panel.length())) {
        std::cerr << "warning: " << w << "\n";
    }
    RhoOptions opt;
    opt.order = a.order;
    opt.threads = a.threads;
    opt.use_cache = !a.no_cache;
    const auto rho = rho_matrix(panel, a.scale, a.q, opt);
    emit(a.out, matrix_to_csv(rho, "rho"));
    if (!a.distance.empty()) write_matrix_csv(a.distance, to_distance(rho), "distance");
    if (!a.dump_boxes.empty()) dump_boxes(a.dump_boxes, panel, a.scale, a.q, a.order);
}

struct TreeArgs {
    std::string in;
    std::string rho;
    std::size_t scale = 20;
    double q = 2.0;
    unsigned order = 2;
    std::string thresholds;
    std::optional<double> tau;
    std::string attributes;
    std::string out_dir = ".";
    unsigned threads = 0;
};

void run_tree(const TreeArgs& a) {
    if (a.in.empty() == a.rho.empty()) throw ValidationError("give exactly one of --in (panel) or --rho (matrix)");
    RhoMatrix rho;
    if (!a.in.empty()) {
        RhoOptions opt;
        opt.order = a.order;
        opt.threads = a.threads;
        rho = rho_matrix(read_series_panel(a.in), a.scale, a.q, opt);
    } else {
        static_cast<SymmetricMatrix&>(rho) = read_matrix_csv(a.rho);
        rho.scale = a.scale;
        rho.q = a.q;
        rho.order = a.order;
    }
    auto tree = kruskal(to_distance(rho), rho);
    std::optional<double> tau = a.tau;
    if (!a.thresholds.empty()) tau = read_thresholds_csv(a.thresholds).at(a.scale, a.q).tau;
    if (tau) tree = mark_significance(tree, rho, *tau);

    const AttributeMap attrs = a.attributes.empty() ? AttributeMap{} : read_attributes(a.attributes);
    const nlohmann::json provenance = {{"s", a.scale}, {"q", a.q}, {"m", a.order},
                                       {"source", a.in.empty() ? a.rho : a.in},
                                       {"tau", tau ? nlohmann::json(*tau) : nlohmann::json()}};
    const std::filesystem::path dir(a.out_dir);
    const auto m = metrics(tree);
    write_text((dir / "tree.json").string(), tree_report(tree, m, provenance).dump(2) + "\n");
    write_text((dir / "tree.dot").string(), to_dot(tree, attrs));
    write_text((dir / "tree.graphml").string(), to_graphml(tree, attrs));
    std::cout << "edges=" << tree.edges.size() << " L=" << m.average_path_length << " max_degree=" << m.max_degree
              << " (" << m.max_degree_node << ")\n";
    if (tau) {
        const auto f = filter_tree(tree, rho, *tau);
        const auto fm = metrics(f.tree);
        auto report = tree_report(f.tree, fm, provenance);
        report["components"] = f.components;
        report["removed_nodes"] = f.removed_nodes;
        write_text((dir / "filtered.json").string(), report.dump(2) + "\n");
        write_text((dir / "filtered.dot").string(), to_dot(f.tree, attrs));
        write_text((dir / "filtered.graphml").string(), to_graphml(f.tree, attrs));
        std::cout << "filtered: nodes=" << f.tree.labels.size() << " edges=" << f.tree.edges.size()
                  << " removed_nodes=" << f.removed_nodes << " L=" << fm.average_path_length << "\n";
    }
}

struct AuditArgs {
    std::string in;
    std::string scales = "20,200";
    std::string q_values = "-4,-3,-2,-1,1,2,3,4";
    unsigned order = 2;
    std::string out;
    unsigned threads = 0;
};

void run_audit(const AuditArgs& a) {
    const auto panel = read_series_panel(a.in);
    const auto scales = parse_size_list(a.scales, "--s");
    const auto qs = parse_real_list(a.q_values, "--q");
    (void)DetrendConfig{a.order, scales, qs}.validate(panel.length(), true);
    RhoOptions opt;
    opt.order = a.order;
    opt.audit_mode = true;
    opt.threads = a.threads;
    std::string out = "s,q,triples,violations,worst_slack\n";
    for (const auto s : scales) {
        const auto mats = rho_matrices(panel, s, qs, opt);
        for (const auto& rho : mats) {
            const auto r = triangle_audit(to_distance(rho));
            out += csv::join({std::to_string(s), csv::format_exact(rho.q), std::to_string(r.triples_checked),
                              std::to_string(r.violations), csv::format_sig(r.worst_slack, 6)});
            out += '\n';
        }
    }
    emit(a.out, out);
}

struct ThresholdArgs {
    std::string in;
    std::string scales = "20";
    std::string q_values = "1,2,3,4,5,6";
    std::size_t n_sets = 50;
    std::uint64_t seed = 0;
    unsigned order = 2;
    std::string out;
    unsigned threads = 0;
};

void run_thresholds(const ThresholdArgs& a) {
    const auto panel = read_series_panel(a.in);
    const auto scales = parse_size_list(a.scales, "--s");
    const auto qs = parse_real_list(a.q_values, "--q");
    (void)DetrendConfig{a.order, scales, qs}.validate(panel.length());
    RhoOptions opt;
    opt.order = a.order;
    opt.threads = a.threads;
    emit(a.out, thresholds_to_csv(surrogate_thresholds(panel, scales, qs, a.n_sets, a.seed, opt)));
}

struct CompareArgs {
    std::string in;
    std::string dts = "1";
    std::string scales = "20";
    std::string q_values = "1,2,3,4,5,6";
    unsigned order = 2;
    std::vector<std::string> trees;
    std::string out;
    unsigned threads = 0;
};

void run_compare(const CompareArgs& a) {
    if (!a.trees.empty()) {
        if (a.trees.size() != 2) throw ValidationError("--trees expects exactly two tree JSON files");
        const auto ta = tree_from_report(nlohmann::json::parse(read_text(a.trees[0])));
        const auto tb = tree_from_report(nlohmann::json::parse(read_text(a.trees[1])));
        const auto c = compare(ta, tb);
        emit(a.out, "common_edges,jaccard\n" + std::to_string(c.common_edges) + "," + csv::format_sig(c.jaccard, 6) + "\n");
        return;
    }
    if (a.in.empty()) throw ValidationError("compare needs --in (1-step returns) or --trees");
    const auto panel = read_series_panel(a.in);
    const auto dts = parse_size_list(a.dts, "--dt");
    const auto scales = parse_size_list(a.scales, "--s");
    const auto qs = parse_real_list(a.q_values, "--q");
    (void)DetrendConfig{a.order, scales, qs}.validate(panel.length());
    RhoOptions opt;
    opt.order = a.order;
    opt.threads = a.threads;
    emit(a.out, similarity_to_csv(similarity_grid(panel, dts, scales, qs, opt)));
}

struct RunArgs {
    std::string config;
    std::string output;
    std::optional<unsigned> threads;
};

void run_run(const RunArgs& a) {
    auto config = RunConfig::from_file(a.config);
    if (const char* env = std::getenv("QMST_OUTPUT_DIR"); env && *env) config.output_dir = env;
    if (!a.output.empty()) config.output_dir = a.output;
    if (a.threads) config.threads = *a.threads;
    const auto r = run_pipeline(config);
    std::cout << "manifest " << r.manifest_path << " sha256=" << r.manifest_hash << " cells_ok=" << r.cells_ok
              << " cells_failed=" << r.cells_failed << "\n";
    if (r.cells_failed > 0) throw ComputationError(std::to_string(r.cells_failed) + " cell(s) failed; see manifest");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"q-dependent detrended cross-correlation networks and minimum spanning trees"};
    app.require_subcommand(1);

    SynthArgs synth;
    auto* c_synth = app.add_subcommand("synth", "Generate a synthetic panel");
    c_synth->add_option("--kind", synth.kind, "arfima | pairs | heavy-pairs | gaussian")->capture_default_str();
    c_synth->add_option("-n,--n", synth.n, "Series (arfima, gaussian) or pairs (pairs, heavy-pairs)")->capture_default_str();
    c_synth->add_option("-T,--length", synth.length, "Series length")->capture_default_str();
    c_synth->add_option("-d,--d", synth.d, "ARFIMA fractional parameter")->capture_default_str();
    c_synth->add_option("-K,--truncation", synth.truncation, "ARFIMA MA truncation and burn-in")->capture_default_str();
    c_synth->add_option("--gamma", synth.gamma, "Pair coupling in [0, 1]")->capture_default_str();
    c_synth->add_option("--dof", synth.dof, "Student-t degrees of freedom (heavy-pairs)")->capture_default_str();
    c_synth->add_option("--seed", synth.seed)->capture_default_str();
    c_synth->add_option("--threads", synth.threads);
    c_synth->add_option("-o,--out", synth.out, "Output CSV")->required();

    TransformArgs transform;
    auto* c_transform = app.add_subcommand("transform", "Compute returns and apply transforms");
    c_transform->add_option("-i,--in", transform.in, "Input panel CSV")->required();
    c_transform->add_option("-o,--out", transform.out, "Output panel CSV")->required();
    c_transform->add_flag("--prices", transform.prices, "Input holds prices; compute log-returns");
    c_transform->add_option("--dt", transform.dt, "Return interval (prices) or aggregation interval (returns)")->capture_default_str();
    c_transform->add_flag("--drop-gaps", transform.drop_gaps, "Drop returns spanning timestamp gaps");
    c_transform->add_option("-t,--transform", transform.chain,
                            "shuffle | gaussianize | sign | amp-shuffle-above:X | amp-shuffle-below:X [:signed]");
    c_transform->add_option("--seed", transform.seed)->capture_default_str();

    RhoArgs rho;
    auto* c_rho = app.add_subcommand("rho", "Compute a rho_q matrix");
    c_rho->add_option("-i,--in", rho.in, "Returns panel CSV")->required();
    c_rho->add_option("-s,--s", rho.scale)->capture_default_str();
    c_rho->add_option("-q,--q", rho.q)->capture_default_str();
    c_rho->add_option("-m,--m", rho.order, "Detrending polynomial order")->capture_default_str();
    c_rho->add_option("-o,--out", rho.out, "rho matrix CSV (default stdout)");
    c_rho->add_option("--distance", rho.distance, "Also write the distance matrix");
    c_rho->add_option("--dump-boxes", rho.dump_boxes, "Debug dump of per-box moments");
    c_rho->add_option("--threads", rho.threads);
    c_rho->add_flag("--no-cache", rho.no_cache, "Recompute F_zz per pair");

    TreeArgs tree;
    auto* c_tree = app.add_subcommand("tree", "Build a q-dependent minimum spanning tree");
    c_tree->add_option("-i,--in", tree.in, "Returns panel CSV");
    c_tree->add_option("--rho", tree.rho, "Precomputed rho matrix CSV");
    c_tree->add_option("-s,--s", tree.scale)->capture_default_str();
    c_tree->add_option("-q,--q", tree.q)->capture_default_str();
    c_tree->add_option("-m,--m", tree.order)->capture_default_str();
    c_tree->add_option("--thresholds", tree.thresholds, "Threshold table CSV");
    c_tree->add_option("--tau", tree.tau, "Explicit significance threshold");
    c_tree->add_option("--attributes", tree.attributes, "Node attributes CSV (label,sector,capitalization)");
    c_tree->add_option("-o,--out-dir", tree.out_dir)->capture_default_str();
    c_tree->add_option("--threads", tree.threads);

    AuditArgs audit;
    auto* c_audit = app.add_subcommand("audit", "Triangle-inequality audit of d_q");
    c_audit->add_option("-i,--in", audit.in, "Panel CSV")->required();
    c_audit->add_option("-s,--s", audit.scales, "Comma-separated scales")->capture_default_str();
    c_audit->add_option("-q,--q", audit.q_values, "Comma-separated q (negative allowed)")->capture_default_str();
    c_audit->add_option("-m,--m", audit.order)->capture_default_str();
    c_audit->add_option("-o,--out", audit.out);
    c_audit->add_option("--threads", audit.threads);

    ThresholdArgs thr;
    auto* c_thr = app.add_subcommand("thresholds", "Surrogate significance thresholds");
    c_thr->add_option("-i,--in", thr.in, "Returns panel CSV")->required();
    c_thr->add_option("-s,--s", thr.scales)->capture_default_str();
    c_thr->add_option("-q,--q", thr.q_values)->capture_default_str();
    c_thr->add_option("--n-sets", thr.n_sets)->capture_default_str();
    c_thr->add_option("--seed", thr.seed)->capture_default_str();
    c_thr->add_option("-m,--m", thr.order)->capture_default_str();
    c_thr->add_option("-o,--out", thr.out);
    c_thr->add_option("--threads", thr.threads);

    CompareArgs cmp;
    auto* c_cmp = app.add_subcommand("compare", "Pearson vs rho_q similarity, or tree common edges");
    c_cmp->add_option("-i,--in", cmp.in, "1-step returns panel CSV");
    c_cmp->add_option("--dt", cmp.dts, "Pearson sampling intervals")->capture_default_str();
    c_cmp->add_option("-s,--s", cmp.scales)->capture_default_str();
    c_cmp->add_option("-q,--q", cmp.q_values)->capture_default_str();
    c_cmp->add_option("-m,--m", cmp.order)->capture_default_str();
    c_cmp->add_option("--trees", cmp.trees, "Two tree JSON reports")->expected(2);
    c_cmp->add_option("-o,--out", cmp.out);
    c_cmp->add_option("--threads", cmp.threads);

    RunArgs run;
    auto* c_run = app.add_subcommand("run", "Run the full pipeline from a config file");
    c_run->add_option("-c,--config", run.config)->required();
    c_run->add_option("-o,--output", run.output, "Output directory (overrides config and QMST_OUTPUT_DIR)");
    c_run->add_option("--threads", run.threads);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kExitOk : kExitValidation;
    }

    try {
        if (c_synth->parsed()) run_synth(synth);
        if (c_transform->parsed()) run_transform(transform);
        if (c_rho->parsed()) run_rho(rho);
        if (c_tree->parsed()) run_tree(tree);
        if (c_audit->parsed()) run_audit(audit);
        if (c_thr->parsed()) run_thresholds(thr);
        if (c_cmp->parsed()) run_compare(cmp);
        if (c_run->parsed()) run_run(run);
    } catch (const ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitValidation;
    } catch (const ComputationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitComputation;
    } catch (const IoError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitIo;
    } catch (const nlohmann::json::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitIo;
    }
    return kExitOk;
}
