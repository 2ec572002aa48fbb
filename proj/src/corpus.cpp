#include "tablekit/corpus.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "json_detail.hpp"

namespace tablekit {

Rng Rng::derived(uint64_t seed, uint64_t index) {
    // splitmix64 of (seed, index) so per-sample streams stay decorrelated
    // under parallel generation.
    uint64_t z = seed + 0x9E3779B97F4A7C15ull * (index + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    z ^= z >> 31;
    return Rng(z);
}

double Rng::uniform01() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double Rng::uniform(double lo, double hi) { return lo + uniform01() * (hi - lo); }

int Rng::uniform_int(int lo, int hi) {
    if (lo > hi) throw std::invalid_argument("uniform_int: empty range");
    uint64_t span = static_cast<uint64_t>(hi) - static_cast<uint64_t>(lo) + 1;
    return lo + static_cast<int>(next_u64() % span);
}

bool Rng::bernoulli(double p) { return uniform01() < p; }

void validate_config(const CorpusConfig& config) {
    auto check_prob = [](double p, const char* name) {
        if (!(p >= 0.0 && p <= 1.0))
            throw std::invalid_argument(std::string(name) + " must be in [0,1]");
    };
    check_prob(config.span_probability, "span_probability");
    check_prob(config.empty_cell_probability, "empty_cell_probability");
    check_prob(config.watermark.probability, "watermark probability");
    check_prob(config.watermark.min_iou, "watermark min_iou");
    if (config.n_samples < 0) throw std::invalid_argument("n_samples must be non-negative");
    if (config.max_rows < 1 || config.max_cols < 1)
        throw std::invalid_argument("max_rows and max_cols must be positive");
    if (config.span_probability > 0.0 && config.max_span < 2)
        throw std::invalid_argument("max_span must be >= 2 when spans are enabled");
    if (config.max_boxes_per_cell < 1)
        throw std::invalid_argument("max_boxes_per_cell must be positive");
    if (config.box_slots < 0) throw std::invalid_argument("box_slots must be non-negative");
    if (config.feature_dim < 1) throw std::invalid_argument("feature_dim must be positive");
}

TableGrid generate_grid(Rng& rng, const CorpusConfig& config) {
    validate_config(config);
    TableGrid grid;
    grid.n_rows = rng.uniform_int(1, config.max_rows);
    grid.n_cols = rng.uniform_int(1, config.max_cols);
    std::vector<bool> taken(static_cast<size_t>(grid.n_rows) * grid.n_cols, false);
    auto is_taken = [&](int r, int c) { return taken[static_cast<size_t>(r) * grid.n_cols + c]; };

    for (int r = 0; r < grid.n_rows; ++r) {
        for (int c = 0; c < grid.n_cols; ++c) {
            if (is_taken(r, c)) continue;
            int rowspan = 1, colspan = 1;
            if (config.span_probability > 0.0 && rng.bernoulli(config.span_probability)) {
                // A few bounded attempts; a draw is rejected if clipped cells
                // are already taken, then the cell falls back to 1x1.
                for (int attempt = 0; attempt < 4; ++attempt) {
                    int rs = std::min(rng.uniform_int(1, config.max_span), grid.n_rows - r);
                    int cs = std::min(rng.uniform_int(1, config.max_span), grid.n_cols - c);
                    bool free = true;
                    for (int rr = r; rr < r + rs && free; ++rr)
                        for (int cc = c; cc < c + cs && free; ++cc)
                            if (is_taken(rr, cc)) free = false;
                    if (free) {
                        rowspan = rs;
                        colspan = cs;
                        break;
                    }
                }
            }
            for (int rr = r; rr < r + rowspan; ++rr)
                for (int cc = c; cc < c + colspan; ++cc)
                    taken[static_cast<size_t>(rr) * grid.n_cols + cc] = true;
            CellSpec cell;
            cell.row = r;
            cell.col = c;
            cell.rowspan = rowspan;
            cell.colspan = colspan;
            cell.empty = true;  // emptiness and content are decided with the annotations
            grid.cells.push_back(cell);
        }
    }
    ensure_valid(grid);
    return grid;
}

namespace {

// Table occupies [kTableMargin, 1 - kTableMargin]^2; boxes sit inside their
// cell with small pads so watermark overhang can reach a neighboring box.
// Vertical pads scale with the row height (not the cell height) so boxes
// anchored in one row share a y origin and raster order equals anchor order.
constexpr double kTableMargin = 0.02;
constexpr double kCellPadX = 0.05;   // fraction of cell width, each side
constexpr double kCellPadY = 0.15;   // fraction of row height, each side
constexpr double kSliceTrim = 0.05;  // fraction of slice width, each side

std::string random_word(Rng& rng) {
    int len = rng.uniform_int(3, 8);
    std::string word;
    word.reserve(len);
    for (int i = 0; i < len; ++i) word += static_cast<char>('a' + rng.uniform_int(0, 25));
    return word;
}

}  // namespace

GeneratedAnnotations generate_annotations(Rng& rng, TableGrid& grid,
                                          const CorpusConfig& config) {
    ensure_valid(grid);
    const double span_w = 1.0 - 2.0 * kTableMargin;
    const double col_w = span_w / grid.n_cols;
    const double row_h = span_w / grid.n_rows;

    GeneratedAnnotations out;
    for (int i = 0; i < grid.cell_count(); ++i) {
        CellSpec& cell = grid.cells[i];
        if (rng.bernoulli(config.empty_cell_probability)) {
            cell.empty = true;
            cell.content.reset();
            continue;
        }
        int n_boxes = rng.uniform_int(1, config.max_boxes_per_cell);
        double cx0 = kTableMargin + cell.col * col_w;
        double cx1 = kTableMargin + (cell.col + cell.colspan) * col_w;
        double cy0 = kTableMargin + cell.row * row_h;
        double cy1 = kTableMargin + (cell.row + cell.rowspan) * row_h;
        double inner_x0 = cx0 + kCellPadX * (cx1 - cx0);
        double inner_x1 = cx1 - kCellPadX * (cx1 - cx0);
        double inner_y0 = cy0 + kCellPadY * row_h;
        double inner_y1 = cy1 - kCellPadY * row_h;
        double slice_w = (inner_x1 - inner_x0) / n_boxes;

        std::string content;
        for (int s = 0; s < n_boxes; ++s) {
            double bx0 = inner_x0 + s * slice_w + kSliceTrim * slice_w;
            double bx1 = inner_x0 + (s + 1) * slice_w - kSliceTrim * slice_w;
            std::string word = random_word(rng);
            if (s) content += ' ';
            content += word;
            AnnotatedBox box;
            box.bbox = BBox(bx0, inner_y0, bx1, inner_y1);
            box.text = std::move(word);
            box.target = i;
            box.distractor = false;
            out.annotations.boxes.push_back(std::move(box));
            out.pointer_targets.emplace_back(i);
        }
        cell.empty = false;
        cell.content = std::move(content);
    }
    return out;
}

namespace {

// Stretched-and-jittered copy of the source box. Stretching is horizontal
// and one-sided so the distractor can poke into the neighboring cell's box
// while keeping IOU with its source above the floor.
BBox make_distractor_bbox(Rng& rng, const BBox& src, double min_iou) {
    for (int attempt = 0; attempt < 8; ++attempt) {
        double stretch = rng.uniform(0.12, 0.26) * src.width();
        bool to_right = rng.bernoulli(0.5);
        double x0 = to_right ? src.x0 : src.x0 - stretch;
        double x1 = to_right ? src.x1 + stretch : src.x1;
        double squeeze = rng.uniform(0.0, 0.03) * src.height();
        double shift = rng.uniform(-0.02, 0.02) * src.height();
        double y0 = src.y0 + squeeze / 2 + shift;
        double y1 = src.y1 - squeeze / 2 + shift;
        x0 = std::max(0.0, x0);
        x1 = std::min(1.0, x1);
        y0 = std::max(0.0, y0);
        y1 = std::min(1.0, y1);
        if (!(x0 < x1 && y0 < y1)) continue;
        BBox candidate(x0, y0, x1, y1);
        if (iou(candidate, src) >= min_iou) return candidate;
    }
    return src;  // exact copy, IOU 1
}

int auto_box_slots(const CorpusConfig& config, int n_boxes) {
    return config.box_slots > 0 ? config.box_slots : n_boxes + 1;
}

}  // namespace

CorpusSample inject_watermarks(Rng& rng, CorpusSample sample, const CorpusConfig& config) {
    const auto& words = watermark_texts();
    CellAnnotations boxes;
    std::vector<std::optional<int>> targets;
    for (size_t i = 0; i < sample.annotations.boxes.size(); ++i) {
        const AnnotatedBox& box = sample.annotations.boxes[i];
        boxes.boxes.push_back(box);
        targets.push_back(sample.pointer_targets[i]);
        if (box.distractor || !rng.bernoulli(config.watermark.probability)) continue;
        AnnotatedBox mark;
        mark.bbox = make_distractor_bbox(rng, box.bbox, config.watermark.min_iou);
        mark.text = words[rng.uniform_int(0, static_cast<int>(words.size()) - 1)];
        mark.distractor = true;
        boxes.boxes.push_back(std::move(mark));
        targets.emplace_back(std::nullopt);
    }
    sample.annotations = std::move(boxes);
    sample.pointer_targets = std::move(targets);
    sample.layout = build_sequence_layout(
        static_cast<int>(sample.annotations.boxes.size()),
        auto_box_slots(config, static_cast<int>(sample.annotations.boxes.size())));
    return sample;
}

CorpusSample generate_sample(const CorpusConfig& config, int index) {
    validate_config(config);
    Rng rng = Rng::derived(config.seed, static_cast<uint64_t>(index));
    TableGrid grid = generate_grid(rng, config);
    GeneratedAnnotations gen = generate_annotations(rng, grid, config);

    std::vector<bool> empty_tags;
    empty_tags.reserve(grid.cells.size());
    for (const CellSpec& cell : grid.cells) empty_tags.push_back(cell.empty);

    int n_boxes = static_cast<int>(gen.annotations.boxes.size());
    CorpusSample sample{
        grid,
        grid_to_otsl(grid),
        grid_to_html(grid, true),
        std::move(gen.annotations),
        build_sequence_layout(n_boxes, auto_box_slots(config, n_boxes)),
        std::move(gen.pointer_targets),
        std::move(empty_tags),
    };
    if (config.watermark.enabled) sample = inject_watermarks(rng, std::move(sample), config);
    return sample;
}

std::vector<CorpusSample> generate_corpus(const CorpusConfig& config) {
    std::vector<CorpusSample> samples;
    samples.reserve(config.n_samples);
    for (int i = 0; i < config.n_samples; ++i) samples.push_back(generate_sample(config, i));
    return samples;
}

GridReport validate_sample(const CorpusSample& sample) {
    GridReport report = validate_grid(sample.grid);
    if (!report.ok) return report;
    auto flag = [&](std::string msg) {
        report.ok = false;
        report.violations.push_back(std::move(msg));
    };
    GridReport ann = validate_annotations(sample.grid, sample.annotations);
    for (std::string& v : ann.violations) report.violations.push_back(std::move(v));
    report.ok = report.ok && ann.ok;

    std::vector<int> tags = data_tag_indices(sample.otsl);
    if (tags.size() != sample.grid.cells.size())
        flag("data tag count does not match cell count");
    if (sample.empty_tags.size() != sample.grid.cells.size())
        flag("one empty label per cell required");
    if (sample.pointer_targets.size() != sample.annotations.boxes.size())
        flag("one pointer target entry per box required");
    if (sample.layout.n_real_boxes != static_cast<int>(sample.annotations.boxes.size()))
        flag("layout box count does not match annotations");

    std::vector<bool> has_box(sample.grid.cells.size(), false);
    for (size_t i = 0; i < sample.pointer_targets.size() &&
                       i < sample.annotations.boxes.size();
         ++i) {
        const auto& target = sample.pointer_targets[i];
        const AnnotatedBox& box = sample.annotations.boxes[i];
        if (target.has_value() == box.distractor)
            flag("box " + std::to_string(i) + " pointer target inconsistent with distractor flag");
        if (target) {
            if (*target < 0 || *target >= static_cast<int>(tags.size()))
                flag("box " + std::to_string(i) + " pointer target out of range");
            else
                has_box[*target] = true;
        }
    }
    for (size_t m = 0; m < sample.empty_tags.size(); ++m) {
        if (sample.empty_tags[m] && m < has_box.size() && has_box[m])
            flag("tag " + std::to_string(m) + " labeled empty but has boxes");
        if (!sample.empty_tags[m] && m < has_box.size() && !has_box[m])
            flag("tag " + std::to_string(m) + " has no boxes but is not labeled empty");
    }
    return report;
}

OracleFeatures oracle_features(const CorpusSample& sample, int d, double margin) {
    if (!(margin > 0.0)) throw std::invalid_argument("oracle margin must be positive");
    std::vector<int> tags = data_tag_indices(sample.otsl);
    int n_cells = static_cast<int>(tags.size());
    if (d < n_cells + 2)
        throw std::invalid_argument("feature dimension too small: need at least " +
                                    std::to_string(n_cells + 2));
    int n_tokens = static_cast<int>(sample.otsl.tokens().size());
    const SequenceLayout& layout = sample.layout;

    // Axis 0 carries the empty signal against the special slot, axis 1 parks
    // distractors, axes 2.. are one per data tag.
    OracleFeatures out;
    out.h = Matrix(layout.box_slots + n_tokens, d, 0.0);
    out.h.at(SequenceLayout::special_slot, 0) = 1.0;
    for (int j = 0; j < layout.n_real_boxes; ++j) {
        const auto& target = sample.pointer_targets[j];
        if (target)
            out.h.at(1 + j, 2 + *target) = margin;
        else
            out.h.at(1 + j, 1) = 1.0;  // scores 0 on every tag, below all real hits
    }
    for (int m = 0; m < n_cells; ++m) {
        int row = layout.box_slots + tags[m];
        out.h.at(row, 2 + m) = 1.0;
        out.h.at(row, 0) = sample.empty_tags[m] ? margin : -margin;
    }
    out.proj_b = ProjectionMatrix::identity(d);
    out.proj_t = ProjectionMatrix::identity(d);
    out.proj_s = ProjectionMatrix::identity(d);
    return out;
}

namespace kw {

const char* kShort[] = {"Draft", "Final", "Copy", "Legal", "Alert", "Audit", "Proof",
                        "Valid", "Stamp", "Issue", "Bonus", "Check", "Title", "Specs",
                        "Photo", "Chart", "Trial", "Claim", "Code", "Quote"};
const char* kMedium[] = {"Approved", "Reviewed", "Reserved", "Released", "Received",
                         "Rejected", "Verified", "Original", "Recorded", "Canceled",
                         "Internal", "External", "Modified", "Drafting", "Proposal",
                         "Expiring", "Amended", "Corrected", "Invoice", "Template",
                         "Archived", "Secure", "Private", "Contract", "Warranty",
                         "Training", "Briefing", "Guidance", "Exhibit"};
const char* kLong[] = {"Unauthorized", "Preliminary", "Confidential", "For Review",
                       "For Approval", "Restricted", "Do Not Copy", "Not Final",
                       "Intellectual", "Property", "For Comment", "Draft Version",
                       "Superseded", "Information", "Classified", "Validation",
                       "Obsolete", "Assessment", "Watermarked", "Benchmark",
                       "Evaluation", "Disclaimer", "For Internal Use", "Duplicated",
                       "For Reference", "Instructor Copy", "Registration",
                       "For Attention", "For Distribution", "Certification"};

}  // namespace kw

const std::vector<std::string>& watermark_texts() {
    static const std::vector<std::string> all = [] {
        std::vector<std::string> v;
        for (const char* s : kw::kShort) v.emplace_back(s);
        for (const char* s : kw::kMedium) v.emplace_back(s);
        for (const char* s : kw::kLong) v.emplace_back(s);
        return v;
    }();
    return all;
}

namespace {

constexpr int kFormatVersion = 1;

nlohmann::json sample_json(const CorpusSample& sample) {
    nlohmann::json targets = nlohmann::json::array();
    for (const auto& t : sample.pointer_targets)
        targets.push_back(t ? nlohmann::json(*t) : nlohmann::json(nullptr));
    return nlohmann::json{
        {"format_version", kFormatVersion},
        {"grid", detail::grid_json(sample.grid)},
        {"otsl", sample.otsl.str()},
        {"html", html_to_string(sample.html_gt)},
        {"annotations", detail::annotations_json(sample.annotations)},
        {"layout",
         {{"box_slots", sample.layout.box_slots}, {"n_real_boxes", sample.layout.n_real_boxes}}},
        {"pointer_targets", targets},
        {"empty_tags", sample.empty_tags},
    };
}

CorpusSample sample_from(const nlohmann::json& j) {
    if (!j.contains("format_version") || !j.at("format_version").is_number_integer() ||
        j.at("format_version").get<int>() != kFormatVersion)
        throw std::invalid_argument("unsupported format_version");
    TableGrid grid = detail::grid_from(j.at("grid"));
    OtslSequence otsl = OtslSequence::parse(j.at("otsl").get<std::string>());
    HtmlNode html = parse_html(j.at("html").get<std::string>());
    CellAnnotations ann = detail::annotations_from(j.at("annotations"));
    SequenceLayout layout = build_sequence_layout(j.at("layout").at("n_real_boxes").get<int>(),
                                                  j.at("layout").at("box_slots").get<int>());
    std::vector<std::optional<int>> targets;
    for (const auto& t : j.at("pointer_targets"))
        targets.push_back(t.is_null() ? std::optional<int>{} : std::optional<int>{t.get<int>()});
    std::vector<bool> empty_tags = j.at("empty_tags").get<std::vector<bool>>();
    return CorpusSample{std::move(grid), std::move(otsl),    std::move(html),
                        std::move(ann),  std::move(layout),  std::move(targets),
                        std::move(empty_tags)};
}

}  // namespace

std::string sample_to_json(const CorpusSample& sample) { return sample_json(sample).dump(); }

CorpusSample sample_from_json(const std::string& text) {
    return sample_from(nlohmann::json::parse(text));
}

void write_corpus(const std::string& path, const std::vector<CorpusSample>& samples) {
    std::ofstream out(path);
    if (!out) throw CorpusIoError("IoFailure", -1, "cannot open " + path + " for writing");
    for (const CorpusSample& s : samples) out << sample_to_json(s) << '\n';
    if (!out) throw CorpusIoError("IoFailure", -1, "write failed for " + path);
}

std::vector<CorpusSample> read_corpus(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw CorpusIoError("IoFailure", -1, "cannot open " + path);
    std::vector<CorpusSample> samples;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        try {
            samples.push_back(sample_from_json(line));
        } catch (const std::exception& e) {
            throw CorpusIoError("SchemaViolation", line_no,
                                "line " + std::to_string(line_no) + ": " + e.what());
        }
    }
    return samples;
}

}  // namespace tablekit
