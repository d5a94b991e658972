#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <variant>
#include <vector>

namespace postshot {

struct OcrLine {
  std::size_t index = 0;
  std::string text;

  bool operator==(const OcrLine&) const = default;
};

struct ExternalEngine {
  std::string name;
  std::string version;
  std::string command_template;  // settings actually used, for reproducibility

  bool operator==(const ExternalEngine&) const = default;
};

struct Sidecar {
  std::filesystem::path path;

  bool operator==(const Sidecar&) const = default;
};

using OcrSource = std::variant<ExternalEngine, Sidecar>;

/// Ordered text lines recovered from one screenshot.
///
/// Line indices are contiguous from 0, no line contains a line break and
/// trailing blank lines are never present. Interior blank lines are kept;
/// the grouper relies on vertical layout.
class OcrDocument {
 public:
  OcrDocument() = default;
  OcrDocument(std::string screenshot_id, const std::vector<std::string>& lines, OcrSource source);

  // Splits `raw` on CR-LF, CR or LF, drops form feeds and trailing blank lines.
  static OcrDocument from_text(std::string screenshot_id, std::string_view raw, OcrSource source);

  const std::string& screenshot_id() const { return screenshot_id_; }
  const std::vector<OcrLine>& lines() const { return lines_; }
  const OcrLine& line(std::size_t i) const { return lines_.at(i); }
  std::size_t size() const { return lines_.size(); }
  bool empty() const { return lines_.empty(); }
  const OcrSource& source() const { return source_; }

  // Lines joined with '\n', no trailing newline.
  std::string joined() const;

  bool operator==(const OcrDocument&) const = default;

 private:
  std::string screenshot_id_;
  std::vector<OcrLine> lines_;
  OcrSource source_;
};

struct EngineConfig {
  std::string name = "tesseract";
  // Whitespace-separated argv; "{input}" is replaced with the image path.
  // Double quotes group an argument containing spaces.
  std::string command_template = "tesseract {input} stdout";
  // Optional argv used to query the engine version ("tesseract --version").
  // The first nonblank output line is recorded.
  std::string version_template;
};

/// Runs the external engine on `image_path` and splits its stdout into lines.
/// Throws Error{EngineNotFound | EngineFailure | UnreadableImage}.
OcrDocument run_ocr(const std::filesystem::path& image_path, const EngineConfig& engine);

/// Throws Error{FileNotFound | InvalidEncoding}.
OcrDocument load_sidecar(const std::filesystem::path& text_path, std::string screenshot_id);

void save_sidecar(const OcrDocument& doc, const std::filesystem::path& text_path);

// True when the file starts with a known raster signature (PNG, JPEG, GIF,
// BMP, TIFF, WebP, PNM).
bool looks_like_raster_image(const std::filesystem::path& path);

}  // namespace postshot
