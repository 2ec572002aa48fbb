#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "tablekit/html.hpp"
#include "tablekit/matrix.hpp"
#include "tablekit/otsl.hpp"
#include "tablekit/pointer.hpp"
#include "tablekit/table.hpp"

namespace tablekit {

// Deterministic random source. All draws go through explicit arithmetic on
// mt19937_64 output so corpora are byte-identical across platforms and
// standard libraries.
class Rng {
  public:
    explicit Rng(uint64_t seed) : eng_(seed) {}
    static Rng derived(uint64_t seed, uint64_t index);

    uint64_t next_u64() { return eng_(); }
    double uniform01();                    // [0, 1)
    double uniform(double lo, double hi);  // [lo, hi)
    int uniform_int(int lo, int hi);       // inclusive bounds
    bool bernoulli(double p);

  private:
    std::mt19937_64 eng_;
};

struct WatermarkConfig {
    bool enabled = false;
    double probability = 0.2;
    double min_iou = 0.8;
};

struct CorpusConfig {
    uint64_t seed = 0;
    int n_samples = 1;
    int max_rows = 6;
    int max_cols = 6;
    double span_probability = 0.0;
    int max_span = 3;
    double empty_cell_probability = 0.0;
    int max_boxes_per_cell = 1;  // boxes per non-empty cell drawn uniformly from 1..max
    WatermarkConfig watermark;
    int feature_dim = 64;
    int box_slots = 0;  // 0 = minimal layout (boxes + special slot, no padding)
};

void validate_config(const CorpusConfig& config);

struct CorpusSample {
    TableGrid grid;
    OtslSequence otsl;
    HtmlNode html_gt;  // with content
    CellAnnotations annotations;
    SequenceLayout layout;
    // Per box: target column into the data-tag set; absent for distractors.
    std::vector<std::optional<int>> pointer_targets;
    std::vector<bool> empty_tags;  // per data tag

    bool operator==(const CorpusSample&) const = default;
};

GridReport validate_sample(const CorpusSample& sample);

TableGrid generate_grid(Rng& rng, const CorpusConfig& config);

struct GeneratedAnnotations {
    CellAnnotations annotations;
    std::vector<std::optional<int>> pointer_targets;
};

// Lays 1..k boxes inside each non-empty cell on the uniform table geometry,
// fills the cell contents with the space-joined box texts, and labels each
// box with its cell's data-tag column.
GeneratedAnnotations generate_annotations(Rng& rng, TableGrid& grid, const CorpusConfig& config);

// For each real box, with the configured probability, inserts one distractor
// box right after it whose geometry keeps IOU >= min_iou with the source.
CorpusSample inject_watermarks(Rng& rng, CorpusSample sample, const CorpusConfig& config);

CorpusSample generate_sample(const CorpusConfig& config, int index);
std::vector<CorpusSample> generate_corpus(const CorpusConfig& config);

struct OracleFeatures {
    Matrix h;  // (box_slots + n_tags) x d
    ProjectionMatrix proj_b;
    ProjectionMatrix proj_t;
    ProjectionMatrix proj_s;
};

// Constructs decoder-state stand-ins that make the pointer mechanism recover
// the ground-truth associations with the given logit margin: real boxes peak
// at their true tag column, the special slot scores +margin on empty tags and
// -margin otherwise, distractors score below every real association.
OracleFeatures oracle_features(const CorpusSample& sample, int d, double margin);

struct CorpusIoError : std::runtime_error {
    std::string kind;  // IoFailure | SchemaViolation
    int line;          // 1-based, -1 when not line-scoped
    CorpusIoError(std::string k, int l, const std::string& msg)
        : std::runtime_error(msg), kind(std::move(k)), line(l) {}
};

std::string sample_to_json(const CorpusSample& sample);
CorpusSample sample_from_json(const std::string& text);

// JSON-lines, one sample per line, format_version 1.
void write_corpus(const std::string& path, const std::vector<CorpusSample>& samples);
std::vector<CorpusSample> read_corpus(const std::string& path);

// Watermark candidate texts grouped by length.
const std::vector<std::string>& watermark_texts();

}  // namespace tablekit
