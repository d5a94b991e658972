#include "postshot/ocr.hpp"

#include <array>
#include <fstream>
#include <sstream>

#include "postshot/error.hpp"
#include "postshot/text.hpp"
#include "process.hpp"

namespace postshot {

namespace fs = std::filesystem;

OcrDocument::OcrDocument(std::string screenshot_id, const std::vector<std::string>& lines,
                         OcrSource source)
    : screenshot_id_(std::move(screenshot_id)), source_(std::move(source)) {
  lines_.reserve(lines.size());
  for (const auto& l : lines) {
    if (l.find_first_of("\r\n") != std::string::npos) {
      throw std::invalid_argument("OCR line contains a line break");
    }
    lines_.push_back({lines_.size(), l});
  }
}

OcrDocument OcrDocument::from_text(std::string screenshot_id, std::string_view raw,
                                   OcrSource source) {
  std::vector<std::string> lines;
  std::string cur;
  bool pending = false;  // a line has been started since the last break
  for (std::size_t i = 0; i < raw.size(); ++i) {
    char c = raw[i];
    if (c == '\r' || c == '\n') {
      if (c == '\r' && i + 1 < raw.size() && raw[i + 1] == '\n') ++i;
      lines.push_back(std::move(cur));
      cur.clear();
      pending = false;
    } else if (c == '\f') {
      pending = true;  // page separator emitted by some engines
    } else {
      cur.push_back(c);
      pending = true;
    }
  }
  if (pending) lines.push_back(std::move(cur));
  while (!lines.empty() && text::trim(lines.back()).empty()) lines.pop_back();
  return OcrDocument(std::move(screenshot_id), lines, std::move(source));
}

std::string OcrDocument::joined() const {
  std::string out;
  for (const auto& l : lines_) {
    if (l.index > 0) out.push_back('\n');
    out += l.text;
  }
  return out;
}

bool looks_like_raster_image(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return false;
  std::array<unsigned char, 12> h{};
  in.read(reinterpret_cast<char*>(h.data()), h.size());
  auto n = static_cast<std::size_t>(in.gcount());
  auto starts = [&](std::initializer_list<unsigned char> sig, std::size_t at = 0) {
    if (n < at + sig.size()) return false;
    std::size_t i = at;
    for (unsigned char b : sig) {
      if (h[i++] != b) return false;
    }
    return true;
  };
  return starts({0x89, 'P', 'N', 'G', 0x0D, 0x0A, 0x1A, 0x0A}) || starts({0xFF, 0xD8, 0xFF}) ||
         starts({'G', 'I', 'F', '8'}) || starts({'B', 'M'}) || starts({'I', 'I', 0x2A, 0x00}) ||
         starts({'M', 'M', 0x00, 0x2A}) || (starts({'R', 'I', 'F', 'F'}) && starts({'W', 'E', 'B', 'P'}, 8)) ||
         (n >= 2 && h[0] == 'P' && h[1] >= '1' && h[1] <= '6');
}

namespace {

std::vector<std::string> expand_template(const std::string& tmpl, const std::string& input) {
  auto argv = detail::split_command(tmpl);
  for (auto& a : argv) {
    for (std::size_t pos; (pos = a.find("{input}")) != std::string::npos;) {
      a.replace(pos, 7, input);
    }
  }
  return argv;
}

std::string engine_version(const EngineConfig& engine) {
  if (engine.version_template.empty()) return {};
  auto argv = detail::split_command(engine.version_template);
  if (argv.empty()) return {};
  auto exe = detail::find_executable(argv[0]);
  if (!exe) return {};
  argv[0] = *exe;
  auto r = detail::run_process(argv);
  // tesseract prints its version on stdout or stderr depending on release
  for (const std::string* s : {&r.out, &r.err}) {
    std::istringstream lines(*s);
    for (std::string line; std::getline(lines, line);) {
      auto t = text::trim(line);
      if (!t.empty()) return std::string(t);
    }
  }
  return {};
}

}  // namespace

OcrDocument run_ocr(const fs::path& image_path, const EngineConfig& engine) {
  std::error_code ec;
  if (!fs::is_regular_file(image_path, ec) || !looks_like_raster_image(image_path)) {
    throw Error(ErrorCode::UnreadableImage, "not a readable raster image: " + image_path.string());
  }
  auto argv = expand_template(engine.command_template, image_path.string());
  if (argv.empty()) throw Error(ErrorCode::EngineNotFound, "empty engine command template");
  auto exe = detail::find_executable(argv[0]);
  if (!exe) throw Error(ErrorCode::EngineNotFound, "executable not found: " + argv[0]);
  argv[0] = *exe;

  detail::ProcessResult r;
  try {
    r = detail::run_process(argv);
  } catch (const std::exception& e) {
    throw Error(ErrorCode::EngineFailure, e.what());
  }
  if (r.exit_code != 0) {
    throw Error(ErrorCode::EngineFailure,
                "exit code " + std::to_string(r.exit_code) + ": " + std::string(text::trim(r.err)));
  }
  if (!text::valid_utf8(r.out)) {
    throw Error(ErrorCode::EngineFailure, "engine output is not valid UTF-8");
  }
  ExternalEngine source{engine.name, engine_version(engine), engine.command_template};
  return OcrDocument::from_text(image_path.stem().string(), r.out, std::move(source));
}

OcrDocument load_sidecar(const fs::path& text_path, std::string screenshot_id) {
  std::ifstream in(text_path, std::ios::binary);
  if (!in) throw Error(ErrorCode::FileNotFound, "cannot open sidecar: " + text_path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  std::string raw = buf.str();
  if (raw.size() >= 3 && raw.compare(0, 3, "\xEF\xBB\xBF") == 0) raw.erase(0, 3);
  if (!text::valid_utf8(raw)) {
    throw Error(ErrorCode::InvalidEncoding, "sidecar is not UTF-8: " + text_path.string());
  }
  return OcrDocument::from_text(std::move(screenshot_id), raw, Sidecar{text_path});
}

void save_sidecar(const OcrDocument& doc, const fs::path& text_path) {
  std::ofstream out(text_path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::IoError, "cannot write sidecar: " + text_path.string());
  out << doc.joined();
  if (!out) throw Error(ErrorCode::IoError, "write failed: " + text_path.string());
}

}  // namespace postshot
