#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "feedenrich/feed_model.hpp"
#include "feedenrich/keyword_extractor.hpp"

namespace feedenrich {

class TrainingError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ModelFormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ModelVersionError : public ModelFormatError {
 public:
  using ModelFormatError::ModelFormatError;
};

// The 21 parent news categories. Order fixes score-vector indexing.
class LabelSet {
 public:
  static constexpr std::size_t kSize = 21;

  static const LabelSet& iptc_parents();
  // One label per line. Throws ConfigError unless there are exactly 21
  // unique non-empty labels.
  static LabelSet from_file(const std::string& path);
  explicit LabelSet(std::vector<std::string> labels);

  const std::vector<std::string>& labels() const { return labels_; }
  std::size_t size() const { return labels_.size(); }
  const std::string& operator[](std::size_t i) const { return labels_[i]; }
  std::optional<std::size_t> index_of(std::string_view label) const;

  bool operator==(const LabelSet&) const = default;

 private:
  std::vector<std::string> labels_;
};

// Sorted (id, weight) pairs.
struct FeatureVector {
  std::vector<std::pair<std::uint32_t, double>> entries;

  bool empty() const { return entries.empty(); }
};

class Vocabulary {
 public:
  Vocabulary() = default;
  // Ids follow the order of `terms`.
  explicit Vocabulary(std::vector<std::string> terms);

  std::optional<std::uint32_t> id(std::string_view term) const;
  const std::vector<std::string>& terms() const { return terms_; }
  std::size_t size() const { return terms_.size(); }

 private:
  std::vector<std::string> terms_;
  std::unordered_map<std::string, std::uint32_t> ids_;
};

// Stopword-filtered in-vocabulary token counts, L2-normalized.
FeatureVector featurize(std::string_view text, const Vocabulary& vocab,
                        const StopwordList& stopwords = StopwordList::english());

struct TrainingConfig {
  std::size_t epochs = 20;
  double learning_rate = 0.5;
  double lambda = 1e-4;  // L2 regularization
  std::uint64_t seed = 42;
  std::size_t min_document_frequency = 2;
  // Fraction of the corpus held out to fit the confidence scale.
  double calibration_fraction = 0.2;
};

struct TrainingExample {
  std::string text;
  std::string label;
};

struct Prediction {
  std::string label;
  std::size_t label_index = 0;
  double confidence = 0.0;
  std::vector<double> scores;
};

// One-vs-rest linear classifier: one weight vector and bias per label.
// Confidence is the softmax of the scores multiplied by `score_scale`.
class OvrModel {
 public:
  struct Metadata {
    TrainingConfig config;
    std::uint64_t corpus_hash = 0;
    std::size_t corpus_size = 0;
  };

  OvrModel(LabelSet labels, Vocabulary vocab, std::vector<std::vector<double>> weights, std::vector<double> bias,
           double score_scale, Metadata metadata);

  const LabelSet& labels() const { return labels_; }
  const Vocabulary& vocabulary() const { return vocab_; }
  const std::vector<std::vector<double>>& weights() const { return weights_; }
  const std::vector<double>& bias() const { return bias_; }
  double score_scale() const { return score_scale_; }
  const Metadata& metadata() const { return metadata_; }

  std::vector<double> scores(const FeatureVector& x) const;
  Prediction predict(const FeatureVector& x) const;
  Prediction predict(std::string_view text) const;

 private:
  LabelSet labels_;
  Vocabulary vocab_;
  std::vector<std::vector<double>> weights_;
  std::vector<double> bias_;
  double score_scale_;
  Metadata metadata_;
};

// softmax(scale * scores) at the argmax (first index on ties).
std::pair<std::size_t, double> softmax_argmax(std::span<const double> scores, double scale = 1.0);

// Hinge-loss SGD per label with a fixed seed. Throws TrainingError for an
// empty or single-label corpus, ConfigError for labels outside `labels`.
OvrModel train(std::span<const TrainingExample> corpus, const LabelSet& labels, const TrainingConfig& config = {});

// label<TAB>text per line, UTF-8. Throws ConfigError on unreadable files or
// malformed lines.
std::vector<TrainingExample> load_corpus(const std::string& path);

void save_model(const OvrModel& model, const std::string& path);
std::string serialize_model(const OvrModel& model);
OvrModel load_model(const std::string& path);
OvrModel deserialize_model(std::string_view data);

enum class ClassificationStatus { Assigned, BelowThreshold, AlreadyCategorized, NoText };

std::string_view to_string(ClassificationStatus s);

struct ClassificationOutcome {
  ClassificationStatus status = ClassificationStatus::NoText;
  std::optional<Prediction> prediction;
  FeedItem item;
};

// Predicts on the item's full text (or description) and assigns the label
// as a predicted category iff the item has no categories and the
// confidence reaches `threshold`.
ClassificationOutcome classify_item(const OvrModel& model, FeedItem item, double threshold = 0.8);

}  // namespace feedenrich
