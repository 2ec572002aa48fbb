#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "tablekit/contrastive.hpp"
#include "tablekit/corpus.hpp"
#include "tablekit/filter.hpp"
#include "tablekit/html.hpp"
#include "tablekit/losses.hpp"
#include "tablekit/otsl.hpp"
#include "tablekit/pipeline.hpp"
#include "tablekit/pointer.hpp"
#include "tablekit/teds.hpp"

namespace {

using nlohmann::json;
using namespace tablekit;

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::string read_file(const std::string& path) {
    if (!std::filesystem::exists(path)) throw UsageError("no such file: " + path);
    std::ifstream in(path, std::ios::binary);
    if (!in) throw UsageError("cannot open " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void write_output(const std::string& out_path, const std::string& content) {
    if (out_path.empty()) {
        std::cout << content;
        if (content.empty() || content.back() != '\n') std::cout << '\n';
        return;
    }
    std::ofstream out(out_path, std::ios::binary);
    if (!out) throw UsageError("cannot open " + out_path + " for writing");
    out << content;
    if (content.empty() || content.back() != '\n') out << '\n';
}

std::string strip(const std::string& s) {
    size_t a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    size_t b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

TableGrid grid_from_dialect(const std::string& dialect, const std::string& text) {
    if (dialect == "otsl") return otsl_to_grid(OtslSequence::parse(strip(text)));
    return html_to_grid(parse_html(text));
}

std::string grid_to_dialect(const std::string& dialect, const TableGrid& grid) {
    if (dialect == "otsl") return grid_to_otsl(grid).str();
    return html_to_string(grid_to_html(grid, true));
}

int run_convert(const std::string& from, const std::string& to, const std::string& in_path,
                const std::string& out_path) {
    std::string text = read_file(in_path);
    // html -> html keeps content; anything through otsl is structure-only.
    std::string converted;
    if (from == "html" && to == "html") {
        converted = html_to_string(parse_html(text));
    } else {
        converted = grid_to_dialect(to, grid_from_dialect(from, text));
    }
    write_output(out_path, converted);
    return 0;
}

std::vector<HtmlNode> parse_tables_arg(const std::string& text, bool batch,
                                       const std::string& what) {
    std::vector<HtmlNode> tables;
    if (!batch) {
        tables.push_back(parse_html(text));
        return tables;
    }
    std::istringstream in(text);
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (strip(line).empty()) continue;
        json j = json::parse(line);
        if (!j.is_string())
            throw std::invalid_argument(what + " line " + std::to_string(line_no) +
                                        ": expected a JSON string of HTML");
        tables.push_back(parse_html(j.get<std::string>()));
    }
    return tables;
}

int run_score(const std::string& pred_path, const std::string& gt_path, bool struct_only,
              bool batch) {
    auto preds = parse_tables_arg(read_file(pred_path), batch, "pred");
    auto gts = parse_tables_arg(read_file(gt_path), batch, "gt");
    if (preds.size() != gts.size())
        throw std::invalid_argument("pred and gt carry different sample counts");
    const char* metric = struct_only ? "teds_struct" : "teds";
    auto score_one = [&](size_t i) {
        return struct_only ? teds_struct(preds[i], gts[i]) : teds(preds[i], gts[i]);
    };
    if (!batch) {
        json out{{metric, score_one(0)}};
        std::cout << out.dump() << '\n';
        return 0;
    }
    json per = json::array();
    double total = 0.0;
    for (size_t i = 0; i < preds.size(); ++i) {
        double v = score_one(i);
        per.push_back(v);
        total += v;
    }
    json out{{"metric", metric},
             {"per_sample", per},
             {"mean", preds.empty() ? 0.0 : total / preds.size()}};
    std::cout << out.dump() << '\n';
    return 0;
}

int run_gen(const CorpusConfig& config, const std::string& out_path) {
    write_corpus(out_path, generate_corpus(config));
    json out{{"written", config.n_samples}, {"path", out_path}};
    std::cout << out.dump() << '\n';
    return 0;
}

Matrix matrix_from_json(const json& j) {
    Matrix m(j.at("rows").get<int>(), j.at("cols").get<int>());
    const auto& flat = j.at("features");
    if (static_cast<int>(flat.size()) != m.rows * m.cols)
        throw std::invalid_argument("features length does not match rows*cols");
    for (size_t i = 0; i < flat.size(); ++i) m.data[i] = flat.at(i).get<double>();
    return m;
}

ProjectionMatrix projection_from_json(const json& j) {
    Matrix w(j.at("rows").get<int>(), j.at("cols").get<int>());
    const auto& flat = j.at("weights");
    if (static_cast<int>(flat.size()) != w.rows * w.cols)
        throw std::invalid_argument("weights length does not match rows*cols");
    for (size_t i = 0; i < flat.size(); ++i) w.data[i] = flat.at(i).get<double>();
    return ProjectionMatrix(std::move(w), j.at("bias").get<std::vector<double>>());
}

int run_assemble(const std::string& corpus_path, const std::string& features_path,
                 double margin, double tau, const std::string& out_path,
                 const std::string& assignments_path) {
    std::vector<CorpusSample> samples = read_corpus(corpus_path);
    std::vector<std::string> feature_lines;
    if (!features_path.empty()) {
        std::istringstream in(read_file(features_path));
        std::string line;
        while (std::getline(in, line))
            if (!strip(line).empty()) feature_lines.push_back(line);
        if (feature_lines.size() != samples.size())
            throw std::invalid_argument("one features line per corpus sample required");
    }

    std::string html_lines;
    std::string assignment_lines;
    double teds_total = 0.0, struct_total = 0.0;
    int perfect = 0;
    for (size_t i = 0; i < samples.size(); ++i) {
        const CorpusSample& sample = samples[i];
        PointedTable result = [&] {
            if (features_path.empty())
                return run_oracle_pipeline(sample, 0, margin, Temperature(tau));
            json j = json::parse(feature_lines[i]);
            std::vector<std::string> texts;
            std::vector<bool> keep;
            for (const AnnotatedBox& box : sample.annotations.boxes) {
                texts.push_back(box.text);
                keep.push_back(!box.distractor);
            }
            return point_and_assemble(sample.otsl, matrix_from_json(j.at("h")), sample.layout,
                                      projection_from_json(j.at("proj_b")),
                                      projection_from_json(j.at("proj_t")), texts,
                                      Temperature(tau), &keep);
        }();
        double t = teds(result.html, sample.html_gt);
        double ts = teds_struct(result.html, sample.html_gt);
        teds_total += t;
        struct_total += ts;
        if (t == 1.0 && ts == 1.0) ++perfect;
        html_lines += html_to_string(result.html);
        html_lines += '\n';
        json assignment{{"box_to_tag", result.assignment.box_to_tag},
                        {"empty_tags", result.assignment.empty_tags}};
        assignment_lines += assignment.dump();
        assignment_lines += '\n';
    }
    if (!out_path.empty()) write_output(out_path, html_lines);
    if (!assignments_path.empty()) write_output(assignments_path, assignment_lines);
    size_t n = samples.size();
    json out{{"n", n},
             {"teds_mean", n ? teds_total / n : 0.0},
             {"teds_struct_mean", n ? struct_total / n : 0.0},
             {"perfect", perfect}};
    std::cout << out.dump() << '\n';
    return 0;
}

int run_eval_losses(bool fixture_all_ones, uint64_t seed, const LossWeights& weights) {
    json out;
    if (fixture_all_ones) {
        out = json{{"cls", 1.0}, {"ptr", 1.0}, {"ptr_empty", 1.0}, {"contr_row", 1.0},
                   {"contr_col", 1.0},
                   {"combined", combined_loss(1.0, 1.0, 1.0, 1.0, 1.0, weights)}};
        std::cout << out.dump() << '\n';
        return 0;
    }

    // Random fixtures plus a finite-difference check on each analytic gradient.
    Rng rng(seed);
    auto rand_matrix = [&](int r, int c) {
        Matrix m(r, c);
        for (double& v : m.data) v = rng.uniform(-1.0, 1.0);
        return m;
    };

    const int v = 7, n_positions = 5, n_boxes = 4, n_tag_rows = 9, dim = 6;
    TagLogits tag{rand_matrix(n_positions, v), {}};
    for (int i = 0; i < n_positions; ++i) tag.targets.push_back(rng.uniform_int(0, v - 1));
    TagLossValue cls = tag_classification_loss(tag);

    std::vector<int> data_tags{1, 3, 5, 8};
    Matrix logits = rand_matrix(n_boxes, static_cast<int>(data_tags.size()));
    std::vector<int> ptr_targets;
    for (int i = 0; i < n_boxes; ++i)
        ptr_targets.push_back(rng.uniform_int(0, static_cast<int>(data_tags.size()) - 1));
    LossValue ptr = pointer_loss(logits, ptr_targets);

    std::vector<double> special(dim);
    for (double& x : special) x = rng.uniform(-1.0, 1.0);
    Matrix tag_proj = rand_matrix(n_tag_rows, dim);
    std::vector<bool> empty_labels;
    for (size_t i = 0; i < data_tags.size(); ++i) empty_labels.push_back(rng.bernoulli(0.3));
    ScalarLoss ptr_empty = empty_pointer_loss(special, tag_proj, data_tags, empty_labels);

    CorpusConfig cfg;
    cfg.seed = seed;
    cfg.max_rows = 4;
    cfg.max_cols = 4;
    cfg.span_probability = 0.3;
    cfg.max_span = 3;
    cfg.max_boxes_per_cell = 2;
    CorpusSample sample = generate_sample(cfg, 0);
    ContrastiveSets row_sets = positive_sets(sample.grid, sample.annotations, SpanAxis::Row);
    ContrastiveSets col_sets = positive_sets(sample.grid, sample.annotations, SpanAxis::Column);
    Matrix emb = rand_matrix(row_sets.n_boxes, dim);
    Temperature tau(0.5);
    ContrastiveLoss row_loss = span_contrastive_loss(emb, row_sets, tau);
    ContrastiveLoss col_loss = span_contrastive_loss(emb, col_sets, tau);

    auto fd_err_matrix = [&](const Matrix& input, const Matrix& analytic, auto&& eval) {
        std::vector<double> x(input.data);
        std::vector<double> numeric = finite_diff_gradient(
            [&](const std::vector<double>& vars) {
                Matrix m = input;
                m.data = vars;
                return eval(m);
            },
            x, 1e-6);
        return max_rel_error(analytic.data, numeric);
    };
    double cls_err = fd_err_matrix(tag.logits, cls.grad, [&](const Matrix& m) {
        return tag_classification_loss(TagLogits{m, tag.targets}).value;
    });
    double ptr_err = fd_err_matrix(logits, ptr.grad, [&](const Matrix& m) {
        return pointer_loss(m, ptr_targets).value;
    });
    double row_err = fd_err_matrix(emb, row_loss.grad, [&](const Matrix& m) {
        return span_contrastive_loss(m, row_sets, tau).mean;
    });
    std::vector<double> empty_logits;
    for (int k : data_tags) {
        double z = 0.0;
        for (int c = 0; c < dim; ++c) z += special[c] * tag_proj.at(k, c);
        empty_logits.push_back(z);
    }
    std::vector<double> empty_numeric = finite_diff_gradient(
        [&](const std::vector<double>& zs) {
            double total = 0.0;
            for (size_t m = 0; m < zs.size(); ++m) {
                double y = empty_labels[m] ? 1.0 : 0.0;
                double z = zs[m];
                double softplus = z > 0.0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z));
                total += softplus - y * z;
            }
            return total / zs.size();
        },
        empty_logits, 1e-6);
    double empty_err = max_rel_error(ptr_empty.grad, empty_numeric);

    double combined = combined_loss(cls.value, ptr.value, ptr_empty.value, row_loss.mean,
                                    col_loss.mean, weights);
    out = json{{"cls", cls.value},
               {"ptr", ptr.value},
               {"ptr_empty", ptr_empty.value},
               {"contr_row", row_loss.mean},
               {"contr_col", col_loss.mean},
               {"combined", combined},
               {"grad_max_rel_err",
                {{"cls", cls_err}, {"ptr", ptr_err}, {"ptr_empty", empty_err},
                 {"contr_row", row_err}}}};
    std::cout << out.dump() << '\n';
    return 0;
}

int run_filter_eval(const std::string& corpus_path, const std::string& params_path,
                    double margin, double tau) {
    std::vector<CorpusSample> samples = read_corpus(corpus_path);
    FilterParams params;
    bool use_params = !params_path.empty();
    if (use_params) {
        json j = json::parse(read_file(params_path));
        params = FilterParams(matrix_from_json(j.at("w1")), j.at("b1").get<std::vector<double>>(),
                              matrix_from_json(j.at("w2")), j.at("b2").get<std::vector<double>>());
    }

    double greedy = 0.0, selective = 0.0, filtered = 0.0;
    double greedy_s = 0.0, selective_s = 0.0, filtered_s = 0.0;
    for (const CorpusSample& sample : samples) {
        HtmlNode g = baseline_assemble(sample.grid, sample.annotations, 0.0);
        HtmlNode s = baseline_assemble(sample.grid, sample.annotations, 0.5);
        greedy += teds(g, sample.html_gt);
        greedy_s += teds_struct(g, sample.html_gt);
        selective += teds(s, sample.html_gt);
        selective_s += teds_struct(s, sample.html_gt);

        PointedTable f = [&] {
            if (!use_params) return run_oracle_pipeline(sample, 0, margin, Temperature(tau));
            // The filter owns the feature dimension: every sample's oracle
            // features are built at the params' input width.
            OracleFeatures oracle = oracle_features(sample, params.d_in(), margin);
            auto [b, t] = split_hidden(oracle.h, sample.layout,
                                       static_cast<int>(sample.otsl.tokens().size()));
            Matrix real(sample.layout.n_real_boxes, b.cols);
            for (int r = 0; r < real.rows; ++r)
                for (int c = 0; c < b.cols; ++c) real.at(r, c) = b.at(1 + r, c);
            std::vector<bool> keep = filter_mask(filter_scores(real, params));
            std::vector<std::string> texts;
            for (const AnnotatedBox& box : sample.annotations.boxes) texts.push_back(box.text);
            return point_and_assemble(sample.otsl, oracle.h, sample.layout, oracle.proj_b,
                                      oracle.proj_t, texts, Temperature(tau), &keep);
        }();
        filtered += teds(f.html, sample.html_gt);
        filtered_s += teds_struct(f.html, sample.html_gt);
    }
    double n = samples.empty() ? 1.0 : static_cast<double>(samples.size());
    json out{{"n", samples.size()},
             {"greedy", {{"teds", greedy / n}, {"teds_struct", greedy_s / n}}},
             {"selective", {{"teds", selective / n}, {"teds_struct", selective_s / n}}},
             {"filtered", {{"teds", filtered / n}, {"teds_struct", filtered_s / n}}}};
    std::cout << out.dump() << '\n';
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"table structure toolkit"};
    app.require_subcommand(1);

    auto* convert = app.add_subcommand("convert", "convert between otsl and html");
    std::string from, to, in_path, out_path;
    convert->add_option("--from", from, "input dialect")
        ->required()
        ->check(CLI::IsMember({"otsl", "html"}));
    convert->add_option("--to", to, "output dialect")
        ->required()
        ->check(CLI::IsMember({"otsl", "html"}));
    convert->add_option("--in", in_path, "input file")->required();
    convert->add_option("--out", out_path, "output file (stdout when omitted)");

    auto* score = app.add_subcommand("score", "TEDS between prediction and ground truth");
    std::string pred_path, gt_path;
    bool struct_only = false, batch = false;
    score->add_option("--pred", pred_path, "predicted HTML file")->required();
    score->add_option("--gt", gt_path, "ground-truth HTML file")->required();
    score->add_flag("--struct-only", struct_only, "erase td contents before scoring");
    score->add_flag("--batch", batch, "JSON-lines batch mode: one HTML string per line");

    auto* gen = app.add_subcommand("gen", "generate a synthetic corpus");
    CorpusConfig config;
    std::string gen_out;
    gen->add_option("--seed", config.seed, "rng seed")->default_val(0);
    gen->add_option("--n", config.n_samples, "sample count")->default_val(1);
    gen->add_option("--max-rows", config.max_rows)->default_val(6);
    gen->add_option("--max-cols", config.max_cols)->default_val(6);
    gen->add_option("--span-prob", config.span_probability)->default_val(0.0);
    gen->add_option("--max-span", config.max_span)->default_val(3);
    gen->add_option("--empty-prob", config.empty_cell_probability)->default_val(0.0);
    gen->add_option("--boxes-per-cell", config.max_boxes_per_cell)->default_val(1);
    double watermark_prob = 0.0;
    gen->add_option("--watermark-prob", watermark_prob, "per-box distractor probability")
        ->default_val(0.0);
    gen->add_option("--watermark-iou", config.watermark.min_iou)->default_val(0.8);
    gen->add_option("--box-slots", config.box_slots, "fixed box block size (0 = minimal)")
        ->default_val(0);
    gen->add_option("--out", gen_out, "output JSON-lines file")->required();

    auto* assemble = app.add_subcommand("assemble", "point boxes to tags and emit tables");
    std::string corpus_path, features_path, assemble_out, assignments_out;
    double margin = 4.0, tau = 0.1;
    assemble->add_option("--corpus", corpus_path, "corpus JSON-lines file")->required();
    assemble->add_option("--features", features_path,
                         "JSON-lines feature file (oracle features when omitted)");
    assemble->add_option("--margin", margin, "oracle logit margin")->default_val(4.0);
    assemble->add_option("--tau", tau, "pointer temperature")->default_val(0.1);
    assemble->add_option("--out", assemble_out, "write assembled HTML lines here");
    assemble->add_option("--assignments", assignments_out,
                         "write box-to-tag assignment JSON lines here");

    auto* eval_losses = app.add_subcommand("eval-losses", "loss and gradient report");
    bool all_ones = false;
    uint64_t eval_seed = 0;
    std::vector<double> weight_values;
    eval_losses->add_flag("--fixture-all-ones", all_ones, "all components fixed at 1");
    eval_losses->add_option("--seed", eval_seed, "random fixture seed")->default_val(0);
    eval_losses->add_option("--weights", weight_values, "five loss weights")->expected(5);

    auto* filter_eval = app.add_subcommand("filter-eval", "watermark baselines vs filtered");
    std::string filter_corpus, params_path;
    double f_margin = 4.0, f_tau = 0.1;
    filter_eval->add_option("--corpus", filter_corpus, "watermarked corpus")->required();
    filter_eval->add_option("--params", params_path,
                            "filter parameter JSON (oracle labels when omitted)");
    filter_eval->add_option("--margin", f_margin)->default_val(4.0);
    filter_eval->add_option("--tau", f_tau)->default_val(0.1);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (*convert) return run_convert(from, to, in_path, out_path);
        if (*score) return run_score(pred_path, gt_path, struct_only, batch);
        if (*gen) {
            config.watermark.enabled = watermark_prob > 0.0;
            config.watermark.probability = watermark_prob;
            return run_gen(config, gen_out);
        }
        if (*assemble)
            return run_assemble(corpus_path, features_path, margin, tau, assemble_out,
                                assignments_out);
        if (*eval_losses) {
            LossWeights weights;
            if (weight_values.size() == 5)
                weights = LossWeights{weight_values[0], weight_values[1], weight_values[2],
                                      weight_values[3], weight_values[4]};
            return run_eval_losses(all_ones, eval_seed, weights);
        }
        if (*filter_eval) return run_filter_eval(filter_corpus, params_path, f_margin, f_tau);
    } catch (const UsageError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 2;
}
