#include "postshot/pipeline.hpp"

#include "postshot/structure.hpp"

namespace postshot {

Pipeline::Pipeline(WordList words, ExtractorConfig config)
    : words_(std::move(words)), config_(std::move(config)) {}

ScreenshotParse Pipeline::run(const OcrDocument& doc) const {
  auto dates = filter_meaningful_dates(find_timestamp_mentions(doc, config_), doc, words_, config_);
  auto handles = filter_author_handles(find_handle_mentions(doc), doc, words_, config_);
  ScreenshotParse parse = group_posts(doc, std::move(handles), std::move(dates));
  Classification c = classify(parse);
  parse.structure = c.structure;
  parse.date_free = c.date_free;
  return parse;
}

}  // namespace postshot
