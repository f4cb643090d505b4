// focus: learn and apply distractor-removing projections from sets of normal data.
//
//   focus synth analytic|images --out DIR ...
//   focus train  --sets DIR --out MODEL ...
//   focus apply  --model MODEL --input FILE|- --out FILE|-
//   focus score  --input FILE|- --scorer knn:K|mahalanobis --out FILE|-
//   focus eval   --scores FILE --labels FILE [--precision-at K,...]
//   focus report --model MODEL
//
// Exit codes follow focus::ExitCode (0 ok, 2 usage/config, 3 io, 4 format,
// 5 dimension, ... 13 metric).

#include <CLI11.hpp>

#include <chrono>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "focus/focus.hpp"

namespace fs = std::filesystem;

namespace {

std::string fixed(const char* fmt, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, fmt, v);
    return buf;
}

void print_spectrum_table(std::ostream& out, const Eigen::VectorXd& eigenvalues,
                          const std::vector<focus::DirectionLabel>& labels) {
    out << "index  eigenvalue             label\n";
    for (Eigen::Index i = 0; i < eigenvalues.size(); ++i) {
        std::string idx = std::to_string(i);
        idx.resize(std::max<std::size_t>(idx.size() + 1, 7), ' ');
        std::string val = fixed("%.15f", eigenvalues[i]);
        val.resize(std::max<std::size_t>(val.size() + 1, 23), ' ');
        out << idx << val << focus::to_string(labels[static_cast<std::size_t>(i)]) << '\n';
    }
}

void print_counts(std::ostream& out, const std::vector<focus::DirectionLabel>& labels) {
    std::size_t null = 0, amb = 0, rem = 0;
    for (auto l : labels) {
        if (l == focus::DirectionLabel::KeepNull) ++null;
        else if (l == focus::DirectionLabel::Ambiguous) ++amb;
        else ++rem;
    }
    out << "kept-null: " << null << "\nambiguous: " << amb << "\nremoved: " << rem << '\n';
}

Eigen::MatrixXd read_input(const std::string& path, const std::string& stdin_format) {
    if (path == "-") {
        if (stdin_format == "focm") {
            std::ostringstream buf;
            buf << std::cin.rdbuf();
            std::istringstream in(buf.str());
            return focus::io::read_focm(in);
        }
        return focus::io::read_csv(std::cin);
    }
    return focus::io::read_matrix(fs::path(path));
}

void write_output(const std::string& path, const Eigen::MatrixXd& m) {
    if (path == "-")
        focus::io::write_csv(std::cout, m);
    else
        focus::io::write_matrix(fs::path(path), m);
}

std::string utc_timestamp() {
    const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

focus::io::MatrixFormat parse_format(const std::string& s) {
    return s == "focm" ? focus::io::MatrixFormat::Focm : focus::io::MatrixFormat::Csv;
}

void write_labelled(const fs::path& dir, const focus::SetCollection& train, const Eigen::MatrixXd& test,
                    const Eigen::VectorXd& labels, focus::io::MatrixFormat format) {
    focus::io::write_set_directory(dir / "train", train, format);
    focus::io::write_matrix(dir / (format == focus::io::MatrixFormat::Focm ? "test.focm" : "test.csv"), test);
    focus::io::write_atomic(dir / "labels.csv",
                            [&](std::ostream& out) { focus::io::write_indexed_column(out, "label", labels, true); });
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Learn and apply projections that remove within-set distractors before anomaly detection"};
    app.require_subcommand(1);

    // synth -------------------------------------------------------------
    auto* synth = app.add_subcommand("synth", "Generate synthetic training sets and a labelled test split");
    synth->require_subcommand(1);
    std::string out_dir;
    std::string format = "csv";
    std::uint64_t seed = 1;

    focus::synth::AnalyticSpec analytic;
    std::size_t analytic_test_n = 200, analytic_test_anomalies = 10;
    double analytic_offset = 1.0;
    auto* synth_analytic = synth->add_subcommand("analytic", "Gaussian sets with descriptive/distracting/constant axes");
    synth_analytic->add_option("--out", out_dir, "Output directory")->required();
    synth_analytic->add_option("--sets", analytic.m_sets, "Number of training sets")->capture_default_str();
    synth_analytic->add_option("--n", analytic.n_per_set, "Points per set")->capture_default_str();
    synth_analytic->add_option("--scale", analytic.scale, "Spacing of set means along e1")->capture_default_str();
    synth_analytic->add_option("--test-n", analytic_test_n, "Normal test points")->capture_default_str();
    synth_analytic->add_option("--test-anomalies", analytic_test_anomalies, "Anomalous test points")->capture_default_str();
    synth_analytic->add_option("--anomaly-offset", analytic_offset, "Offset of anomalies along e3")->capture_default_str();
    synth_analytic->add_option("--seed", seed, "Random seed")->capture_default_str();
    synth_analytic->add_option("--format", format, "Matrix file format")->check(CLI::IsMember({"csv", "focm"}))->capture_default_str();

    focus::synth::IlluminationSpec images;
    std::string shapes = "mixed";
    auto* synth_images = synth->add_subcommand("images", "Silhouette images with illumination gradients");
    synth_images->add_option("--out", out_dir, "Output directory")->required();
    synth_images->add_option("--sets", images.m_sets, "Number of training sets")->capture_default_str();
    synth_images->add_option("--n", images.n_per_set, "Images per set")->capture_default_str();
    synth_images->add_option("--side", images.side, "Image edge length in pixels")->capture_default_str();
    synth_images->add_option("--amp-sigma", images.amp_sigma, "Std of gradient amplitude")->capture_default_str();
    synth_images->add_option("--fraction-lit", images.fraction_lit, "Share of images with a gradient")->capture_default_str();
    synth_images->add_option("--test-normal", images.n_test_normal, "Normal test images")->capture_default_str();
    synth_images->add_option("--test-anomalies", images.n_test_anomalies, "Anomalous test images")->capture_default_str();
    synth_images->add_option("--shapes", shapes, "Training shape families")
        ->check(CLI::IsMember({"mixed", "rectangles", "discs", "crosses"}))
        ->capture_default_str();
    synth_images->add_option("--seed", seed, "Random seed")->capture_default_str();
    synth_images->add_option("--format", format, "Matrix file format")->check(CLI::IsMember({"csv", "focm"}))->capture_default_str();

    // train -------------------------------------------------------------
    auto* train = app.add_subcommand("train", "Learn a mapping from a directory of training sets");
    std::string sets_dir, model_out, weighting = "uniform";
    double epsilon_rel = 1e-6;
    std::optional<double> epsilon_abs, ambiguous_above;
    double cutoff = 0.999, zero_tol = 1e-9;
    bool reproducible = false;
    train->add_option("--sets", sets_dir, "Directory with one matrix file per set")->required();
    train->add_option("--out", model_out, "Model file to write")->required();
    train->add_option("--weighting", weighting, "Prior over sets")->check(CLI::IsMember({"uniform", "proportional"}))->capture_default_str();
    train->add_option("--epsilon", epsilon_rel, "Relative cushion: eps = value * trace(C_all)/d")->capture_default_str();
    train->add_option("--epsilon-abs", epsilon_abs, "Absolute cushion (overrides --epsilon)");
    train->add_option("--cutoff", cutoff, "Remove directions with eigenvalue >= cutoff")->capture_default_str();
    train->add_option("--zero-tol", zero_tol, "Eigenvalues <= zero-tol count as null")->capture_default_str();
    train->add_option("--remove-ambiguous-above", ambiguous_above, "Also remove ambiguous directions at or above this value");
    train->add_flag("--reproducible", reproducible, "Omit timestamps from the model file");

    // apply -------------------------------------------------------------
    auto* apply_cmd = app.add_subcommand("apply", "Project a matrix through a trained model");
    std::string model_path, input_path, output_path, stdin_format = "csv";
    bool backproject = false;
    apply_cmd->add_option("--model", model_path, "Model file")->required();
    apply_cmd->add_option("--input", input_path, "Input matrix (- for stdin)")->required();
    apply_cmd->add_option("--out", output_path, "Output matrix (- for stdout)")->required();
    apply_cmd->add_option("--stdin-format", stdin_format, "Format of stdin input")->check(CLI::IsMember({"csv", "focm"}))->capture_default_str();
    apply_cmd->add_flag("--backproject", backproject, "Map the projected rows back into the input space");

    // score -------------------------------------------------------------
    auto* score_cmd = app.add_subcommand("score", "Score test points for anomalousness");
    std::string scorer_spec = "knn:3";
    std::string score_model;
    score_cmd->add_option("--input", input_path, "Test matrix (- for stdin)")->required();
    score_cmd->add_option("--out", output_path, "Scores CSV (- for stdout)")->required();
    score_cmd->add_option("--scorer", scorer_spec, "knn:<k> or mahalanobis")->capture_default_str();
    score_cmd->add_option("--model", score_model, "Apply this model before scoring");
    score_cmd->add_option("--stdin-format", stdin_format, "Format of stdin input")->check(CLI::IsMember({"csv", "focm"}))->capture_default_str();

    // eval --------------------------------------------------------------
    auto* eval_cmd = app.add_subcommand("eval", "Compare scores against 0/1 labels");
    std::string scores_path, labels_path, metrics_out;
    std::vector<std::size_t> precision_ks;
    eval_cmd->add_option("--scores", scores_path, "Scores CSV (index,score)")->required();
    eval_cmd->add_option("--labels", labels_path, "Labels CSV (index,label)")->required();
    eval_cmd->add_option("--precision-at", precision_ks, "Report precision at these k")->delimiter(',');
    eval_cmd->add_option("--out", metrics_out, "Also write metrics to this file");

    // report ------------------------------------------------------------
    auto* report = app.add_subcommand("report", "Print a model's spectrum");
    report->add_option("--model", model_path, "Model file")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return static_cast<int>(focus::ExitCode::Config);
    }

    try {
        if (synth_analytic->parsed()) {
            analytic.seed = seed;
            const auto sets = focus::synth::gen_analytic(analytic);
            const auto test = focus::synth::gen_analytic_test(analytic, analytic_test_n, analytic_test_anomalies, analytic_offset);
            write_labelled(out_dir, sets, test.points, test.labels, parse_format(format));
        } else if (synth_images->parsed()) {
            images.seed = seed;
            using G = focus::synth::ShapeGenerator;
            const G gen = shapes == "rectangles" ? G::Rectangles : shapes == "discs" ? G::Discs : shapes == "crosses" ? G::Crosses : G::Mixed;
            const auto data = focus::synth::gen_images(images, gen);
            write_labelled(out_dir, data.train, data.test, data.labels, parse_format(format));
        } else if (train->parsed()) {
            const auto sets = focus::io::read_set_directory(sets_dir);
            focus::TrainOptions options;
            options.weighting = weighting == "proportional" ? focus::WeightingScheme::proportional() : focus::WeightingScheme::uniform();
            options.epsilon_rel = epsilon_rel;
            options.epsilon_abs = epsilon_abs;
            options.cutoff = cutoff;
            options.zero_tol = zero_tol;
            options.ambiguous_remove_above = ambiguous_above;
            if (sets.size() == 1)
                std::cerr << "warning: a single training set gives rank(Q) = 0; every direction with "
                             "within-set variance looks like a distractor\n";
            const auto result = focus::train(sets, options);

            focus::ModelMetadata meta;
            meta["tool"] = "focus";
            meta["sets"] = std::to_string(sets.size());
            meta["points"] = std::to_string(sets.total_points());
            meta["weighting"] = options.weighting.name();
            meta["created"] = reproducible ? "reproducible" : utc_timestamp();
            focus::save_model(fs::path(model_out), result.model, meta);

            std::cout << "sets: " << sets.size() << "\ndim: " << sets.dim() << "\nepsilon: "
                      << focus::io::format_double(result.spectrum.epsilon) << '\n';
            print_spectrum_table(std::cout, result.spectrum.eigenvalues, result.model.labels());
            print_counts(std::cout, result.model.labels());
            std::cout << "dim_out: " << result.model.dim_out() << '\n';
            std::cout << "identity_residual: " << fixed("%.3e", result.scatter.identity_residual()) << '\n';
        } else if (apply_cmd->parsed()) {
            const auto stored = focus::load_model(fs::path(model_path));
            const auto x = read_input(input_path, stdin_format);
            auto y = focus::apply(stored.model, x);
            if (backproject) y = focus::backproject(stored.model, y);
            write_output(output_path, y);
        } else if (score_cmd->parsed()) {
            auto x = read_input(input_path, stdin_format);
            if (!score_model.empty()) x = focus::apply(focus::load_model(fs::path(score_model)).model, x);
            const auto rep = focus::score(x, focus::Scorer::parse(scorer_spec));
            auto body = [&](std::ostream& out) { focus::io::write_indexed_column(out, "score", rep.scores); };
            if (output_path == "-")
                body(std::cout);
            else
                focus::io::write_atomic(output_path, body);
        } else if (eval_cmd->parsed()) {
            const auto scores = focus::io::read_indexed_column(fs::path(scores_path));
            const auto labels = focus::io::read_indexed_column(fs::path(labels_path));
            const auto metrics = focus::evaluate(scores, labels, precision_ks);
            std::ostringstream text;
            text << "n: " << scores.size() << '\n';
            text << "positives: " << static_cast<long long>(labels.sum()) << '\n';
            text << "auc: " << fixed("%.6f", metrics.auc) << '\n';
            for (const auto& [k, p] : metrics.precision_at) text << "precision@" << k << ": " << fixed("%.6f", p) << '\n';
            std::cout << text.str();
            if (!metrics_out.empty())
                focus::io::write_atomic(metrics_out, [&](std::ostream& out) { out << text.str(); });
        } else if (report->parsed()) {
            const auto stored = focus::load_model(fs::path(model_path));
            const auto& m = stored.model;
            std::cout << "FOCUS-MODEL dim_in=" << m.dim_in() << " removed=" << m.removed() << " dim_out=" << m.dim_out() << '\n';
            std::cout << "cutoff=" << focus::io::format_double(m.cutoff) << " zero_tol=" << focus::io::format_double(m.zero_tol)
                      << " epsilon=" << focus::io::format_double(m.epsilon) << '\n';
            for (const auto& [k, v] : stored.metadata) std::cout << k << ": " << v << '\n';
            print_spectrum_table(std::cout, m.eigenvalues, m.labels());
            print_counts(std::cout, m.labels());
        }
    } catch (const focus::Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return static_cast<int>(e.exit_code());
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return static_cast<int>(focus::ExitCode::Unexpected);
    }
    return 0;
}
