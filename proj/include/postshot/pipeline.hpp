#pragma once

#include "postshot/grouping.hpp"
#include "postshot/metadata.hpp"
#include "postshot/ocr.hpp"

namespace postshot {

/// find -> filter -> group -> classify over one document. Pure and thread safe.
class Pipeline {
 public:
  Pipeline(WordList words, ExtractorConfig config = default_extractor_config());

  ScreenshotParse run(const OcrDocument& doc) const;

  const WordList& words() const { return words_; }
  const ExtractorConfig& config() const { return config_; }

 private:
  WordList words_;
  ExtractorConfig config_;
};

}  // namespace postshot
