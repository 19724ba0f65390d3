#include "feedenrich/pipeline.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>

#include "CLI11.hpp"
#include "feedenrich/author_extractor.hpp"
#include "feedenrich/feed_io.hpp"
#include "feedenrich/html.hpp"
#include "feedenrich/text_util.hpp"
#include "json.hpp"

namespace feedenrich {

namespace {

void emit(const EnhanceContext& context, std::size_t index, std::string_view stage, const std::string& message) {
  if (!context.log) return;
  context.log("item " + std::to_string(index) + " " + std::string(stage) + ": " + message);
}

// Runs one stage; any exception is logged and counted instead of escaping.
template <typename F>
void stage(const EnhanceContext& context, EnhanceStats& stats, std::size_t index, std::string_view name, F&& body) {
  try {
    body();
  } catch (const std::exception& e) {
    ++stats.stage_failures;
    emit(context, index, name, std::string("failed: ") + e.what());
  }
}

std::optional<std::string> keyword_source(const FeedItem& item) {
  if (item.content_text && !item.content_text->empty()) return item.content_text;
  if (item.content_html) {
    std::string text = html::to_plain_text(*item.content_html);
    if (!trim(text).empty()) return text;
  }
  if (item.title && !item.title->empty()) return item.title;
  return std::nullopt;
}

std::vector<std::size_t> content_lengths(const std::vector<FeedItem>& items) {
  std::vector<std::size_t> out;
  out.reserve(items.size());
  for (const auto& item : items) out.push_back(content_length(item));
  return out;
}

}  // namespace

FeedItem enhance_item(const FeedItem& original, const FetchResult& page, const EnhanceOptions& options,
                      const EnhanceContext& context, EnhanceStats& stats, std::size_t index) {
  FeedItem item = original;
  const StopwordList& stopwords = context.stopwords ? *context.stopwords : StopwordList::english();
  const std::string base = page.final_url.empty() ? page.url : page.final_url;

  stage(context, stats, index, "content", [&] {
    if (item.has(ItemField::Content)) {
      emit(context, index, "content", "kept original");
      return;
    }
    ContentRegion region = extract_text_corpus(page.body, options.density);
    if (trim(region.text).empty()) {
      emit(context, index, "content", "region has no text");
      return;
    }
    item.content_text = region.text;
    item = tag_provenance(std::move(item), ItemField::Content, Provenance::Extracted);
    ++stats.content_extracted;
    emit(context, index, "content",
         "extracted " + std::to_string(utf8_length(region.text)) + " chars from tags " +
             std::to_string(region.start) + ".." + std::to_string(region.end));
  });

  stage(context, stats, index, "keywords", [&] {
    if (item.has(ItemField::Keywords)) {
      emit(context, index, "keywords", "kept original");
      return;
    }
    auto text = keyword_source(item);
    if (!text) {
      emit(context, index, "keywords", "no text");
      return;
    }
    auto terms = extract_keywords(*text, options.keyword_count, stopwords);
    if (terms.empty()) {
      emit(context, index, "keywords", "none found");
      return;
    }
    item.keywords = std::move(terms);
    item = tag_provenance(std::move(item), ItemField::Keywords, Provenance::Extracted);
    ++stats.keywords_extracted;
    emit(context, index, "keywords", std::to_string(item.keywords.size()) + " terms, top '" + item.keywords[0].term + "'");
  });

  stage(context, stats, index, "image", [&] {
    if (item.has(ItemField::Image)) {
      emit(context, index, "image", "kept original");
      return;
    }
    auto images = collect_images(page.body, base, options.image);
    auto selected = select_main_image(images);
    static const NullImageProvider null_provider;
    const ImageProvider& provider = context.provider ? *context.provider : null_provider;
    WarningSink warn = [&](std::string_view msg) { emit(context, index, "image", "warning: " + std::string(msg)); };
    ImageChoice choice = replace_if_inadequate(selected, item.keywords, provider, options.image, warn);
    if (!choice.image) {
      emit(context, index, "image", "none found");
      return;
    }
    item.image = *choice.image;
    item = tag_provenance(std::move(item), ItemField::Image, choice.from_stock ? Provenance::Stock : Provenance::Extracted);
    ++(choice.from_stock ? stats.images_stock : stats.images_extracted);
    emit(context, index, "image", std::string(choice.from_stock ? "stock " : "extracted ") + item.image->url);
  });

  stage(context, stats, index, "author", [&] {
    if (item.has(ItemField::Author)) {
      emit(context, index, "author", "kept original");
      return;
    }
    auto author = extract_author(page.body, base);
    if (!author) {
      emit(context, index, "author", "none found");
      return;
    }
    item.author = *author;
    item = tag_provenance(std::move(item), ItemField::Author, Provenance::Extracted);
    ++stats.authors_extracted;
    emit(context, index, "author", "extracted '" + *author + "'");
  });

  stage(context, stats, index, "category", [&] {
    if (!context.model) {
      emit(context, index, "category", "skipped, no model");
      return;
    }
    auto outcome = classify_item(*context.model, item, options.confidence_threshold);
    std::string detail;
    if (outcome.prediction) {
      std::ostringstream conf;
      conf.precision(3);
      conf << outcome.prediction->confidence;
      detail = " '" + outcome.prediction->label + "' confidence " + conf.str();
    }
    switch (outcome.status) {
      case ClassificationStatus::Assigned:
        ++stats.categories_predicted;
        item = std::move(outcome.item);
        break;
      case ClassificationStatus::BelowThreshold:
        ++stats.categories_below_threshold;
        break;
      default:
        break;
    }
    emit(context, index, "category", std::string(to_string(outcome.status)) + detail);
  });

  normalize_provenance(item);
  return item;
}

EnhanceResult enhance_feed(const FeedDocument& feed, const EnhanceOptions& options, const EnhanceContext& context) {
  if (!context.transport) throw ConfigError("enhance_feed needs a transport");
  options.crawl.validate();
  options.weights.validate();

  EnhanceResult result;
  result.feed = feed;
  result.stats.items = feed.items.size();
  const auto original_lengths = content_lengths(feed.items);
  result.before = analyze_dataset(feed.items, Phase::Before, {}, options.weights, options.flags);

  std::vector<std::string> links;
  links.reserve(feed.items.size());
  for (const auto& item : feed.items) links.push_back(item.link);
  auto pages = crawl_items(links, options.crawl, *context.transport);

  for (std::size_t i = 0; i < feed.items.size(); ++i) {
    const FeedItem& item = feed.items[i];
    auto it = pages.find(item.link);
    if (it == pages.end()) continue;
    if (const auto* err = std::get_if<CrawlError>(&it->second)) {
      ++result.stats.crawl_failed;
      std::string msg = "warning: " + std::string(to_string(err->kind));
      if (!err->message.empty()) msg += " (" + err->message + ")";
      emit(context, i, "crawl", msg + ", item carried through unchanged");
      continue;
    }
    const auto& page = std::get<FetchResult>(it->second);
    ++result.stats.crawled;
    emit(context, i, "crawl",
         "ok " + std::to_string(page.status) + " " + std::to_string(page.body.size()) + " bytes " + page.final_url);
    result.feed.items[i] = enhance_item(item, page, options, context, result.stats, i);
  }

  result.after = analyze_dataset(result.feed.items, Phase::After, original_lengths, options.weights, options.flags);
  return result;
}

std::string report_pair_to_json(const QualityReport& before, const QualityReport& after) {
  nlohmann::ordered_json j;
  j["before"] = nlohmann::ordered_json::parse(report_to_json(before));
  j["after"] = nlohmann::ordered_json::parse(report_to_json(after));
  return j.dump(2);
}

// --- command line ----------------------------------------------------------

namespace {

class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot read '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file(const std::string& path, const std::string& data) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write '" + path + "'");
  out << data;
  if (!out.flush()) throw InputError("cannot write '" + path + "'");
}

std::string load_input(const std::string& input, const Transport& transport, const CrawlPolicy& policy) {
  if (!is_absolute_url(input)) return read_file(input);
  auto url = parse_url(input);
  if (!url) throw InputError("invalid feed URL '" + input + "'");
  CrawlPolicy feed_policy = policy;
  feed_policy.accepted_content_types.clear();
  auto outcome = transport.fetch(*url, feed_policy);
  if (auto* err = std::get_if<CrawlError>(&outcome)) {
    throw InputError("cannot fetch feed: " + std::string(to_string(err->kind)) + " " + err->message);
  }
  return std::get<FetchResult>(outcome).body;
}

FeedDocument parse_input(const std::string& xml, std::ostream& err) {
  ParseStats stats;
  FeedDocument feed = parse_feed(xml, stats);
  if (stats.items_dropped > 0) {
    err << "feedenrich: warning: dropped " << stats.items_dropped << " of " << stats.items_seen
        << " items without a usable link\n";
  }
  return feed;
}

void print_summary(std::ostream& out, const QualityReport& report) {
  out << to_string(report.phase) << ": items " << report.item_count << ", avg content length "
      << report.avg_content_length_chars << ", images " << report.items_with_image << ", categories "
      << report.items_with_category << ", authors " << report.items_with_author << ", avg item quality "
      << report.avg_item_quality << "\n";
}

struct CliSettings {
  std::string config;
  std::string input;
  std::string output;
  std::string report_out;
  std::string model;
  std::string stock_db;
  std::string stopwords;
  std::string site_dir;
  std::string weights;
  std::string labels;
  std::string corpus;
  std::size_t concurrency = CrawlPolicy{}.max_concurrency;
  std::size_t per_host = CrawlPolicy{}.per_host_limit;
  double timeout_s = 15.0;
  double confidence_threshold = 0.8;
  std::uint64_t min_image_area = ImagePolicy{}.min_area;
  std::size_t keywords = EnhanceOptions{}.keyword_count;
  bool no_network = false;
  TrainingConfig training;
};

int cmd_enhance(const CliSettings& s, std::ostream& out, std::ostream& err) {
  EnhanceOptions options;
  options.crawl.max_concurrency = s.concurrency;
  options.crawl.per_host_limit = s.per_host;
  options.crawl.timeout = std::chrono::milliseconds(static_cast<long long>(s.timeout_s * 1000.0));
  if (const char* ua = std::getenv("FEEDENRICH_USER_AGENT"); ua && *ua) options.crawl.user_agent = ua;
  options.image.min_area = s.min_image_area;
  options.confidence_threshold = s.confidence_threshold;
  options.keyword_count = s.keywords;
  if (!s.weights.empty()) options.weights = QualityWeights::parse(s.weights);
  if (s.confidence_threshold < 0.0 || s.confidence_threshold > 1.0) {
    throw ConfigError("--confidence-threshold must lie in [0, 1]");
  }
  options.crawl.validate();

  std::unique_ptr<Transport> transport;
  if (s.no_network) {
    if (s.site_dir.empty()) throw ConfigError("--no-network needs --site-dir");
    transport = std::make_unique<DirectoryTransport>(s.site_dir);
  } else if (!s.site_dir.empty()) {
    throw ConfigError("--site-dir is only used with --no-network");
  } else {
    transport = std::make_unique<HttpTransport>();
  }

  std::optional<StopwordList> stopwords;
  if (!s.stopwords.empty()) stopwords = StopwordList::from_file(s.stopwords);
  std::optional<FixtureImageProvider> provider;
  if (!s.stock_db.empty()) provider = FixtureImageProvider::from_file(s.stock_db);
  std::optional<OvrModel> model;
  if (!s.model.empty()) {
    try {
      model = load_model(s.model);
    } catch (const ModelFormatError& e) {
      throw InputError(std::string("cannot load model: ") + e.what());
    }
  }

  FeedDocument feed = parse_input(load_input(s.input, *transport, options.crawl), err);

  EnhanceContext context;
  context.transport = transport.get();
  context.provider = provider ? &*provider : nullptr;
  context.model = model ? &*model : nullptr;
  context.stopwords = stopwords ? &*stopwords : nullptr;
  context.log = [&err](std::string_view line) { err << "feedenrich: " << line << "\n"; };

  EnhanceResult result = enhance_feed(feed, options, context);
  const auto& st = result.stats;
  err << "feedenrich: crawled " << st.crawled << "/" << st.items << ", content " << st.content_extracted
      << ", images extracted " << st.images_extracted << " stock " << st.images_stock << ", authors "
      << st.authors_extracted << ", categories predicted " << st.categories_predicted << " below threshold "
      << st.categories_below_threshold << ", stage failures " << st.stage_failures << "\n";
  print_summary(out, result.before);
  print_summary(out, result.after);
  if (!s.report_out.empty()) write_file(s.report_out, report_pair_to_json(result.before, result.after) + "\n");

  if (st.crawled == 0) {
    err << "feedenrich: error: no item could be crawled\n";
    return kExitNothingCrawlable;
  }
  write_file(s.output, serialize_enhanced(result.feed).xml);
  return kExitOk;
}

int cmd_train(const CliSettings& s, std::ostream& out, std::ostream&) {
  LabelSet labels = s.labels.empty() ? LabelSet::iptc_parents() : LabelSet::from_file(s.labels);
  auto corpus = load_corpus(s.corpus);
  OvrModel model = train(corpus, labels, s.training);
  save_model(model, s.model);
  out << "trained on " << corpus.size() << " documents, vocabulary " << model.vocabulary().size()
      << ", score scale " << model.score_scale() << "\n";
  return kExitOk;
}

int cmd_report(const CliSettings& s, std::ostream& out, std::ostream& err) {
  QualityWeights weights;
  if (!s.weights.empty()) weights = QualityWeights::parse(s.weights);
  FeedDocument feed = parse_input(read_file(s.input), err);
  FlagOptions flags;
  QualityReport report = analyze_dataset(feed.items, Phase::Before, {}, weights, flags);
  std::string json = report_to_json(report);
  out << json << "\n";
  if (!s.report_out.empty()) write_file(s.report_out, json + "\n");
  return kExitOk;
}

// Values from the file only fill options not given on the command line.
void apply_config(CLI::App& sub, const std::string& path) {
  if (!std::filesystem::is_regular_file(path)) throw InputError("cannot read config '" + path + "'");
  for (const auto& item : CLI::ConfigINI().from_file(path)) {
    if (item.name == "++" || item.name == "--") continue;
    CLI::Option* opt = sub.get_option_no_throw("--" + item.name);
    if (!opt || item.name == "config") throw ConfigError("unknown config key '" + item.fullname() + "'");
    if (opt->count() > 0) continue;
    for (const auto& value : item.inputs) opt->add_result(value);
    opt->run_callback();
  }
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Enrich RSS feeds with full text, keywords, images, authors and categories", "feedenrich"};
  app.require_subcommand(1);
  CliSettings s;

  auto* enhance = app.add_subcommand("enhance", "Enhance a feed and report quality before and after");
  enhance->add_option("--config", s.config, "key=value file with option defaults");
  enhance->add_option("--input", s.input, "Feed file or URL")->required();
  enhance->add_option("--output", s.output, "Enhanced feed output path")->required();
  enhance->add_option("--report-out", s.report_out, "Write the before/after report as JSON");
  enhance->add_option("--model", s.model, "Classifier model file");
  enhance->add_option("--stock-db", s.stock_db, "Stock image table (keyword, url, width, height)");
  enhance->add_option("--stopwords", s.stopwords, "Stopword list, one per line");
  enhance->add_option("--concurrency", s.concurrency, "Global crawl concurrency")->capture_default_str();
  enhance->add_option("--per-host", s.per_host, "Per-host crawl concurrency")->capture_default_str();
  enhance->add_option("--timeout", s.timeout_s, "Per-request timeout in seconds")->capture_default_str();
  enhance->add_option("--confidence-threshold", s.confidence_threshold, "Minimum category confidence")
      ->capture_default_str();
  enhance->add_option("--weights", s.weights, "Six quality weights summing to 100");
  enhance->add_option("--min-image-area", s.min_image_area, "Area below which stock images are sought")
      ->capture_default_str();
  enhance->add_option("--keywords", s.keywords, "Keywords per item")->capture_default_str();
  enhance->add_flag("--no-network", s.no_network, "Serve pages from --site-dir instead of the network");
  enhance->add_option("--site-dir", s.site_dir, "Local mirror laid out as <host>/<path>");

  auto* train_cmd = app.add_subcommand("train", "Train the category classifier");
  train_cmd->add_option("--config", s.config, "key=value file with option defaults");
  train_cmd->add_option("--corpus", s.corpus, "Training corpus, label<TAB>text per line")->required();
  train_cmd->add_option("--model", s.model, "Model output path")->required();
  train_cmd->add_option("--labels", s.labels, "Label list, one per line");
  train_cmd->add_option("--epochs", s.training.epochs)->capture_default_str();
  train_cmd->add_option("--learning-rate", s.training.learning_rate)->capture_default_str();
  train_cmd->add_option("--lambda", s.training.lambda)->capture_default_str();
  train_cmd->add_option("--seed", s.training.seed)->capture_default_str();
  train_cmd->add_option("--min-df", s.training.min_document_frequency)->capture_default_str();
  train_cmd->add_option("--calibration-fraction", s.training.calibration_fraction)->capture_default_str();

  auto* report_cmd = app.add_subcommand("report", "Print the quality report of a feed");
  report_cmd->add_option("--config", s.config, "key=value file with option defaults");
  report_cmd->add_option("--input", s.input, "Feed file")->required();
  report_cmd->add_option("--weights", s.weights, "Six quality weights summing to 100");
  report_cmd->add_option("--report-out", s.report_out, "Also write the report to this path");

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    err << "feedenrich: error: " << e.what() << "\n";
    return kExitInputError;
  }

  try {
    CLI::App* sub = app.get_subcommands().front();
    if (!s.config.empty()) apply_config(*sub, s.config);
    if (enhance->parsed()) return cmd_enhance(s, out, err);
    if (train_cmd->parsed()) return cmd_train(s, out, err);
    return cmd_report(s, out, err);
  } catch (const TrainingError& e) {
    err << "feedenrich: training error: " << e.what() << "\n";
    return kExitTrainingError;
  } catch (const std::exception& e) {
    err << "feedenrich: error: " << e.what() << "\n";
    return kExitInputError;
  }
}

}  // namespace feedenrich
