#include "feedenrich/classifier.hpp"

#include <algorithm>
#include <cerrno>
#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <random>
#include <set>
#include <sstream>

#include "feedenrich/html.hpp"
#include "feedenrich/text_util.hpp"

namespace feedenrich {

namespace {

constexpr std::string_view kMagic = "FEEDENRICH-OVR";
constexpr int kFormatVersion = 1;

const std::vector<std::string>& iptc_label_names() {
  static const std::vector<std::string> names = {
      "arts, culture and entertainment",
      "crime, law and justice",
      "disaster and accident",
      "economy, business and finance",
      "education",
      "environmental issue",
      "health",
      "human interest",
      "labour",
      "lifestyle and leisure",
      "politics",
      "religion and belief",
      "science and technology",
      "social issue",
      "sport",
      "unrest, conflicts and war",
      "weather",
      "travel and tourism",
      "food and drink",
      "fashion and beauty",
      "automotive",
  };
  return names;
}

std::uint64_t fnv1a(std::uint64_t h, std::string_view s) {
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::uint64_t corpus_hash(std::span<const TrainingExample> corpus) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (const auto& ex : corpus) {
    h = fnv1a(h, ex.label);
    h = fnv1a(h, "\t");
    h = fnv1a(h, ex.text);
    h = fnv1a(h, "\n");
  }
  return h;
}

// Fisher-Yates with an explicitly specified engine so the permutation is
// identical across standard library implementations.
void seeded_shuffle(std::vector<std::size_t>& v, std::mt19937_64& rng) {
  for (std::size_t i = v.size(); i > 1; --i) {
    std::size_t j = static_cast<std::size_t>(rng() % i);
    std::swap(v[i - 1], v[j]);
  }
}

std::vector<std::string> filtered_tokens(std::string_view text, const StopwordList& stopwords) {
  std::vector<std::string> out;
  for (auto& t : tokenize(text).tokens) {
    if (!stopwords.contains(t)) out.push_back(std::move(t));
  }
  return out;
}

struct LinearSvm {
  std::vector<double> w;
  double b = 0.0;
};

// Trains every label's binary classifier on the same example order.
std::vector<LinearSvm> sgd_ovr(const std::vector<FeatureVector>& x, const std::vector<std::size_t>& y,
                               std::size_t label_count, std::size_t dim, const TrainingConfig& config) {
  std::vector<LinearSvm> models(label_count, LinearSvm{std::vector<double>(dim, 0.0), 0.0});
  std::vector<double> scale(label_count, 1.0);  // w = scale * stored w
  std::mt19937_64 rng(config.seed);
  std::vector<std::size_t> order(x.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::uint64_t t = 0;
  for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
    seeded_shuffle(order, rng);
    for (std::size_t i : order) {
      ++t;
      double eta = config.learning_rate / (1.0 + config.learning_rate * config.lambda * static_cast<double>(t));
      for (std::size_t k = 0; k < label_count; ++k) {
        LinearSvm& m = models[k];
        double target = y[i] == k ? 1.0 : -1.0;
        double dot = 0.0;
        for (const auto& [id, v] : x[i].entries) dot += m.w[id] * v;
        double margin = target * (scale[k] * dot + m.b);
        scale[k] *= 1.0 - eta * config.lambda;
        if (margin < 1.0) {
          double step = eta * target / scale[k];
          for (const auto& [id, v] : x[i].entries) m.w[id] += step * v;
          m.b += eta * target;
        }
        if (scale[k] < 1e-9) {
          for (double& wj : m.w) wj *= scale[k];
          scale[k] = 1.0;
        }
      }
    }
  }
  for (std::size_t k = 0; k < label_count; ++k) {
    for (double& wj : models[k].w) wj *= scale[k];
  }
  return models;
}

std::vector<double> linear_scores(const std::vector<LinearSvm>& models, const FeatureVector& x) {
  std::vector<double> s(models.size());
  for (std::size_t k = 0; k < models.size(); ++k) {
    double dot = models[k].b;
    for (const auto& [id, v] : x.entries) dot += models[k].w[id] * v;
    s[k] = dot;
  }
  return s;
}

double mean_nll(const std::vector<std::vector<double>>& scores, const std::vector<std::size_t>& y, double scale) {
  double total = 0.0;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    double max = *std::max_element(scores[i].begin(), scores[i].end());
    double z = 0.0;
    for (double s : scores[i]) z += std::exp(scale * (s - max));
    total += -(scale * (scores[i][y[i]] - max) - std::log(z));
  }
  return total / static_cast<double>(scores.size());
}

// Negative log-likelihood is convex in the scale, so golden-section search
// over a bounded interval finds the minimizer.
double fit_score_scale(const std::vector<std::vector<double>>& scores, const std::vector<std::size_t>& y) {
  constexpr double kLow = 1.0;
  constexpr double kHigh = 100.0;
  const double phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = kLow, b = kHigh;
  double c = b - phi * (b - a), d = a + phi * (b - a);
  double fc = mean_nll(scores, y, c), fd = mean_nll(scores, y, d);
  for (int iter = 0; iter < 80; ++iter) {
    if (fc <= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - phi * (b - a);
      fc = mean_nll(scores, y, c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + phi * (b - a);
      fd = mean_nll(scores, y, d);
    }
  }
  return (a + b) / 2.0;
}

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%a", v);
  return buf;
}

double parse_double(const std::string& s) {
  char* end = nullptr;
  double v = std::strtod(s.c_str(), &end);
  if (s.empty() || end != s.c_str() + s.size()) throw ModelFormatError("bad number '" + s + "'");
  return v;
}

std::uint64_t parse_u64(const std::string& s) {
  char* end = nullptr;
  errno = 0;
  unsigned long long v = std::strtoull(s.c_str(), &end, 10);
  if (s.empty() || errno != 0 || end != s.c_str() + s.size()) throw ModelFormatError("bad integer '" + s + "'");
  return v;
}

class LineReader {
 public:
  explicit LineReader(std::string_view data) : data_(data) {}

  std::string next() {
    if (pos_ >= data_.size()) throw ModelFormatError("model file is truncated");
    auto nl = data_.find('\n', pos_);
    if (nl == std::string_view::npos) throw ModelFormatError("model file is truncated");
    std::string line(data_.substr(pos_, nl - pos_));
    pos_ = nl + 1;
    return line;
  }

  // "key value" line with the expected key.
  std::string field(std::string_view key) {
    std::string line = next();
    if (line.size() <= key.size() || line.compare(0, key.size(), key) != 0 || line[key.size()] != ' ') {
      throw ModelFormatError("expected '" + std::string(key) + "' in model file");
    }
    return line.substr(key.size() + 1);
  }

  bool at_end() const { return pos_ >= data_.size(); }

 private:
  std::string_view data_;
  std::size_t pos_ = 0;
};

std::optional<std::string> item_text(const FeedItem& item) {
  if (item.has(ItemField::Content)) return *item.content_text;
  if (item.has(ItemField::Description)) {
    std::string text = html::to_plain_text(*item.content_html);
    if (!trim(text).empty()) return text;
  }
  return std::nullopt;
}

}  // namespace

// --- LabelSet ------------------------------------------------------------

LabelSet::LabelSet(std::vector<std::string> labels) : labels_(std::move(labels)) {
  if (labels_.size() != kSize) {
    throw ConfigError("label set must have exactly " + std::to_string(kSize) + " labels, got " +
                      std::to_string(labels_.size()));
  }
  std::set<std::string> seen;
  for (const auto& l : labels_) {
    if (trim(l).empty()) throw ConfigError("empty label in label set");
    if (!seen.insert(l).second) throw ConfigError("duplicate label '" + l + "'");
  }
}

const LabelSet& LabelSet::iptc_parents() {
  static const LabelSet set(iptc_label_names());
  return set;
}

LabelSet LabelSet::from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read label file '" + path + "'");
  std::vector<std::string> labels;
  std::string line;
  while (std::getline(in, line)) {
    auto t = trim(line);
    if (!t.empty()) labels.emplace_back(t);
  }
  return LabelSet(std::move(labels));
}

std::optional<std::size_t> LabelSet::index_of(std::string_view label) const {
  for (std::size_t i = 0; i < labels_.size(); ++i) {
    if (labels_[i] == label) return i;
  }
  return std::nullopt;
}

// --- Vocabulary / features -------------------------------------------------

Vocabulary::Vocabulary(std::vector<std::string> terms) : terms_(std::move(terms)) {
  for (std::uint32_t i = 0; i < terms_.size(); ++i) {
    if (!ids_.emplace(terms_[i], i).second) throw ModelFormatError("duplicate vocabulary term '" + terms_[i] + "'");
  }
}

std::optional<std::uint32_t> Vocabulary::id(std::string_view term) const {
  auto it = ids_.find(std::string(term));
  if (it == ids_.end()) return std::nullopt;
  return it->second;
}

FeatureVector featurize(std::string_view text, const Vocabulary& vocab, const StopwordList& stopwords) {
  std::map<std::uint32_t, double> counts;
  for (const auto& token : filtered_tokens(text, stopwords)) {
    if (auto id = vocab.id(token)) counts[*id] += 1.0;
  }
  FeatureVector out;
  double norm = 0.0;
  for (const auto& [id, c] : counts) norm += c * c;
  norm = std::sqrt(norm);
  for (const auto& [id, c] : counts) out.entries.emplace_back(id, c / norm);
  return out;
}

// --- model -----------------------------------------------------------------

OvrModel::OvrModel(LabelSet labels, Vocabulary vocab, std::vector<std::vector<double>> weights,
                   std::vector<double> bias, double score_scale, Metadata metadata)
    : labels_(std::move(labels)),
      vocab_(std::move(vocab)),
      weights_(std::move(weights)),
      bias_(std::move(bias)),
      score_scale_(score_scale),
      metadata_(metadata) {
  if (weights_.size() != labels_.size() || bias_.size() != labels_.size()) {
    throw ModelFormatError("model needs one weight vector and bias per label");
  }
  for (const auto& w : weights_) {
    if (w.size() != vocab_.size()) throw ModelFormatError("weight vector size does not match vocabulary");
  }
  if (!(score_scale_ > 0.0) || !std::isfinite(score_scale_)) throw ModelFormatError("score scale must be positive");
}

std::vector<double> OvrModel::scores(const FeatureVector& x) const {
  std::vector<double> s(labels_.size());
  for (std::size_t k = 0; k < labels_.size(); ++k) {
    double dot = bias_[k];
    for (const auto& [id, v] : x.entries) {
      if (id < weights_[k].size()) dot += weights_[k][id] * v;
    }
    s[k] = dot;
  }
  return s;
}

std::pair<std::size_t, double> softmax_argmax(std::span<const double> scores, double scale) {
  if (scores.empty()) return {0, 0.0};
  std::size_t best = 0;
  for (std::size_t k = 1; k < scores.size(); ++k) {
    if (scores[k] > scores[best]) best = k;
  }
  double z = 0.0;
  for (double s : scores) z += std::exp(scale * (s - scores[best]));
  return {best, 1.0 / z};
}

Prediction OvrModel::predict(const FeatureVector& x) const {
  Prediction p;
  p.scores = scores(x);
  auto [index, confidence] = softmax_argmax(p.scores, score_scale_);
  p.label_index = index;
  p.label = labels_[index];
  p.confidence = confidence;
  return p;
}

Prediction OvrModel::predict(std::string_view text) const { return predict(featurize(text, vocab_)); }

OvrModel train(std::span<const TrainingExample> corpus, const LabelSet& labels, const TrainingConfig& config) {
  if (corpus.empty()) throw TrainingError("training corpus is empty");
  std::vector<std::size_t> y;
  y.reserve(corpus.size());
  std::set<std::size_t> distinct;
  for (const auto& ex : corpus) {
    auto idx = labels.index_of(ex.label);
    if (!idx) throw ConfigError("label '" + ex.label + "' is not in the label set");
    y.push_back(*idx);
    distinct.insert(*idx);
  }
  if (distinct.size() < 2) throw TrainingError("training corpus needs at least two distinct labels");
  if (config.epochs == 0 || !(config.learning_rate > 0.0) || config.lambda < 0.0) {
    throw ConfigError("invalid training hyperparameters");
  }

  const StopwordList& stopwords = StopwordList::english();
  std::vector<std::vector<std::string>> docs;
  docs.reserve(corpus.size());
  std::map<std::string, std::size_t> df;
  for (const auto& ex : corpus) {
    docs.push_back(filtered_tokens(ex.text, stopwords));
    std::set<std::string_view> unique(docs.back().begin(), docs.back().end());
    for (auto t : unique) ++df[std::string(t)];
  }
  std::vector<std::string> terms;
  for (const auto& [term, n] : df) {
    if (n >= config.min_document_frequency) terms.push_back(term);
  }
  Vocabulary vocab(std::move(terms));
  std::vector<FeatureVector> x;
  x.reserve(docs.size());
  for (const auto& ex : corpus) x.push_back(featurize(ex.text, vocab, stopwords));

  // Hold out a seeded fraction to fit the confidence scale, then train the
  // final model on everything.
  double score_scale = 1.0;
  std::size_t holdout = static_cast<std::size_t>(config.calibration_fraction * static_cast<double>(corpus.size()));
  if (holdout >= 2 && corpus.size() - holdout >= 2) {
    std::vector<std::size_t> order(corpus.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::mt19937_64 rng(config.seed ^ 0x9e3779b97f4a7c15ULL);
    seeded_shuffle(order, rng);
    std::vector<FeatureVector> fit_x, cal_x;
    std::vector<std::size_t> fit_y, cal_y;
    for (std::size_t i = 0; i < order.size(); ++i) {
      bool calibration = i < holdout;
      (calibration ? cal_x : fit_x).push_back(x[order[i]]);
      (calibration ? cal_y : fit_y).push_back(y[order[i]]);
    }
    if (std::set<std::size_t>(fit_y.begin(), fit_y.end()).size() >= 2) {
      auto aux = sgd_ovr(fit_x, fit_y, labels.size(), vocab.size(), config);
      std::vector<std::vector<double>> cal_scores;
      for (const auto& xi : cal_x) cal_scores.push_back(linear_scores(aux, xi));
      score_scale = fit_score_scale(cal_scores, cal_y);
    }
  }

  auto models = sgd_ovr(x, y, labels.size(), vocab.size(), config);
  std::vector<std::vector<double>> weights;
  std::vector<double> bias;
  for (auto& m : models) {
    weights.push_back(std::move(m.w));
    bias.push_back(m.b);
  }
  OvrModel::Metadata meta{config, corpus_hash(corpus), corpus.size()};
  return OvrModel(labels, std::move(vocab), std::move(weights), std::move(bias), score_scale, meta);
}

std::vector<TrainingExample> load_corpus(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read corpus file '" + path + "'");
  std::vector<TrainingExample> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty()) continue;
    auto tab = line.find('\t');
    if (tab == std::string::npos) throw ConfigError(path + ":" + std::to_string(line_no) + ": expected label<TAB>text");
    out.push_back({line.substr(tab + 1), std::string(trim(std::string_view(line).substr(0, tab)))});
  }
  return out;
}

// --- persistence -----------------------------------------------------------

std::string serialize_model(const OvrModel& model) {
  std::ostringstream out;
  const auto& meta = model.metadata();
  out << kMagic << "\n";
  out << "version " << kFormatVersion << "\n";
  out << "epochs " << meta.config.epochs << "\n";
  out << "learning_rate " << format_double(meta.config.learning_rate) << "\n";
  out << "lambda " << format_double(meta.config.lambda) << "\n";
  out << "seed " << meta.config.seed << "\n";
  out << "min_df " << meta.config.min_document_frequency << "\n";
  out << "calibration_fraction " << format_double(meta.config.calibration_fraction) << "\n";
  out << "corpus_hash " << meta.corpus_hash << "\n";
  out << "corpus_size " << meta.corpus_size << "\n";
  out << "score_scale " << format_double(model.score_scale()) << "\n";
  out << "labels " << model.labels().size() << "\n";
  for (const auto& l : model.labels().labels()) out << l << "\n";
  out << "vocabulary " << model.vocabulary().size() << "\n";
  for (const auto& t : model.vocabulary().terms()) out << t << "\n";
  out << "weights\n";
  for (std::size_t k = 0; k < model.labels().size(); ++k) {
    out << format_double(model.bias()[k]);
    for (double w : model.weights()[k]) out << ' ' << format_double(w);
    out << "\n";
  }
  out << "end\n";
  return out.str();
}

OvrModel deserialize_model(std::string_view data) {
  LineReader in(data);
  if (data.substr(0, kMagic.size()) != kMagic) throw ModelFormatError("not a model file (bad magic)");
  in.next();
  auto version = parse_u64(in.field("version"));
  if (version != static_cast<std::uint64_t>(kFormatVersion)) {
    throw ModelVersionError("model format version " + std::to_string(version) + " is not supported (expected " +
                            std::to_string(kFormatVersion) + ")");
  }
  OvrModel::Metadata meta;
  meta.config.epochs = parse_u64(in.field("epochs"));
  meta.config.learning_rate = parse_double(in.field("learning_rate"));
  meta.config.lambda = parse_double(in.field("lambda"));
  meta.config.seed = parse_u64(in.field("seed"));
  meta.config.min_document_frequency = parse_u64(in.field("min_df"));
  meta.config.calibration_fraction = parse_double(in.field("calibration_fraction"));
  meta.corpus_hash = parse_u64(in.field("corpus_hash"));
  meta.corpus_size = parse_u64(in.field("corpus_size"));
  double scale = parse_double(in.field("score_scale"));
  auto label_count = parse_u64(in.field("labels"));
  if (label_count != LabelSet::kSize) throw ModelFormatError("model must have 21 labels");
  std::vector<std::string> labels;
  for (std::uint64_t i = 0; i < label_count; ++i) labels.push_back(in.next());
  auto vocab_size = parse_u64(in.field("vocabulary"));
  if (vocab_size > data.size()) throw ModelFormatError("vocabulary size exceeds file size");
  std::vector<std::string> terms;
  terms.reserve(vocab_size);
  for (std::uint64_t i = 0; i < vocab_size; ++i) terms.push_back(in.next());
  if (in.next() != "weights") throw ModelFormatError("expected weights section");
  std::vector<std::vector<double>> weights;
  std::vector<double> bias;
  for (std::uint64_t k = 0; k < label_count; ++k) {
    std::istringstream row(in.next());
    std::string token;
    std::vector<double> values;
    while (row >> token) values.push_back(parse_double(token));
    if (values.size() != vocab_size + 1) throw ModelFormatError("weight row has wrong length");
    bias.push_back(values.front());
    weights.emplace_back(values.begin() + 1, values.end());
  }
  if (in.next() != "end") throw ModelFormatError("missing end marker");
  try {
    return OvrModel(LabelSet(std::move(labels)), Vocabulary(std::move(terms)), std::move(weights), std::move(bias),
                    scale, meta);
  } catch (const ConfigError& e) {
    throw ModelFormatError(e.what());
  }
}

void save_model(const OvrModel& model, const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ConfigError("cannot write model file '" + path + "'");
  out << serialize_model(model);
  if (!out) throw ConfigError("failed writing model file '" + path + "'");
}

OvrModel load_model(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read model file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return deserialize_model(buf.str());
}

// --- item classification ---------------------------------------------------

std::string_view to_string(ClassificationStatus s) {
  switch (s) {
    case ClassificationStatus::Assigned: return "assigned";
    case ClassificationStatus::BelowThreshold: return "below-threshold";
    case ClassificationStatus::AlreadyCategorized: return "already-categorized";
    case ClassificationStatus::NoText: return "no-text";
  }
  return "no-text";
}

ClassificationOutcome classify_item(const OvrModel& model, FeedItem item, double threshold) {
  ClassificationOutcome out;
  if (!item.categories.empty()) {
    out.status = ClassificationStatus::AlreadyCategorized;
    out.item = std::move(item);
    return out;
  }
  auto text = item_text(item);
  if (!text) {
    out.status = ClassificationStatus::NoText;
    out.item = std::move(item);
    return out;
  }
  out.prediction = model.predict(*text);
  if (out.prediction->confidence >= threshold) {
    item.categories.push_back(out.prediction->label);
    item = tag_provenance(std::move(item), ItemField::Category, Provenance::Predicted);
    out.status = ClassificationStatus::Assigned;
  } else {
    out.status = ClassificationStatus::BelowThreshold;
  }
  out.item = std::move(item);
  return out;
}

}  // namespace feedenrich
