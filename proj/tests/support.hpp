#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "postshot/metadata.hpp"
#include "postshot/ocr.hpp"

namespace testing {

inline postshot::OcrDocument doc_of(std::vector<std::string> lines, std::string id = "doc") {
  return postshot::OcrDocument(std::move(id), lines, postshot::Sidecar{"mem.txt"});
}

inline const postshot::WordList& words() {
  static const postshot::WordList wl = postshot::load_wordlist(postshot::default_wordlist_path());
  return wl;
}

// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    static std::mt19937_64 rng(std::random_device{}());
    path_ = std::filesystem::temp_directory_path() / ("postshot-" + tag + "-" + std::to_string(rng()));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

inline void write_text(const std::filesystem::path& p, const std::string& content) {
  std::filesystem::create_directories(p.parent_path());
  std::ofstream(p, std::ios::binary) << content;
}

inline std::string read_text(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  return std::string(std::istreambuf_iterator<char>(in), {});
}

// 1x1 white PNG.
inline void write_white_pixel_png(const std::filesystem::path& p) {
  static const unsigned char png[] = {
      0x89, 0x50, 0x4E, 0x47, 0x0D, 0x0A, 0x1A, 0x0A, 0x00, 0x00, 0x00, 0x0D, 0x49, 0x48, 0x44, 0x52,
      0x00, 0x00, 0x00, 0x01, 0x00, 0x00, 0x00, 0x01, 0x08, 0x02, 0x00, 0x00, 0x00, 0x90, 0x77, 0x53,
      0xDE, 0x00, 0x00, 0x00, 0x0C, 0x49, 0x44, 0x41, 0x54, 0x08, 0xD7, 0x63, 0xF8, 0xFF, 0xFF, 0x3F,
      0x00, 0x05, 0xFE, 0x02, 0xFE, 0xA7, 0x35, 0x81, 0x84, 0x00, 0x00, 0x00, 0x00, 0x49, 0x45, 0x4E,
      0x44, 0xAE, 0x42, 0x60, 0x82};
  std::filesystem::create_directories(p.parent_path());
  std::ofstream(p, std::ios::binary).write(reinterpret_cast<const char*>(png), sizeof png);
}

// ---- oracles -------------------------------------------------------------

inline double round2(double x) { return std::floor(x * 100.0 + 0.5 + 1e-9) / 100.0; }

// Exact binomial probability that X lies in [lo, hi].
inline double binomial_mass(int n, double p, int lo, int hi) {
  double total = 0;
  for (int k = std::max(lo, 0); k <= std::min(hi, n); ++k) {
    double log_pmf = std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0) +
                     k * std::log(p) + (n - k) * std::log1p(-p);
    total += std::exp(log_pmf);
  }
  return total;
}

// Smallest central interval [lo, hi] holding at least `coverage` of the mass.
inline std::pair<int, int> binomial_central_interval(int n, double p, double coverage) {
  double tail = (1.0 - coverage) / 2.0;
  int lo = 0;
  while (binomial_mass(n, p, 0, lo) <= tail) ++lo;
  int hi = n;
  while (binomial_mass(n, p, hi, n) <= tail) --hi;
  return {lo, hi};
}

// Published classifier scores in matrix order PnAn, PnA1, P1A1: precision, recall, k.
struct PrintedRow {
  double precision, recall;
  int support;
};
inline constexpr std::array<PrintedRow, 3> kPublishedScores = {{{0.93, 0.72, 18}, {0.50, 0.75, 4}, {0.95, 0.98, 53}}};

using Matrix3 = std::array<std::array<int, 3>, 3>;  // [true][predicted]

// All nonnegative integer 3x3 matrices whose per-class precision and recall
// round to the printed values, with row sums equal to the printed supports.
inline std::vector<Matrix3> published_score_solutions() {
  int total = 0;
  for (const auto& r : kPublishedScores) total += r.support;
  // Diagonal and column-sum candidates per class from the printed ratios.
  std::array<std::vector<std::pair<int, int>>, 3> cands;  // (tp, column sum)
  for (int c = 0; c < 3; ++c) {
    for (int tp = 0; tp <= kPublishedScores[c].support; ++tp) {
      if (round2(double(tp) / kPublishedScores[c].support) != kPublishedScores[c].recall) continue;
      for (int col = std::max(tp, 1); col <= total; ++col) {
        if (round2(double(tp) / col) == kPublishedScores[c].precision) cands[c].push_back({tp, col});
      }
    }
  }
  std::vector<Matrix3> out;
  for (auto [t0, c0] : cands[0])
    for (auto [t1, c1] : cands[1])
      for (auto [t2, c2] : cands[2]) {
        if (c0 + c1 + c2 != total) continue;
        const int tp[3] = {t0, t1, t2};
        const int col[3] = {c0, c1, c2};
        // Off-diagonals: each row splits (support - tp) over two cells.
        int r0 = kPublishedScores[0].support - t0, r1 = kPublishedScores[1].support - t1, r2 = kPublishedScores[2].support - t2;
        for (int a = 0; a <= r0; ++a)
          for (int b = 0; b <= r1; ++b)
            for (int d = 0; d <= r2; ++d) {
              Matrix3 m{};
              m[0] = {t0, a, r0 - a};
              m[1] = {b, t1, r1 - b};
              m[2] = {d, r2 - d, t2};
              bool ok = true;
              for (int j = 0; j < 3 && ok; ++j) {
                ok = m[0][j] + m[1][j] + m[2][j] == col[j] && m[j][j] == tp[j];
              }
              if (ok) out.push_back(m);
            }
      }
  return out;
}

struct OracleMetrics {
  std::array<double, 3> precision, recall, f1;
  double macro_p, macro_r, macro_f1, mean_f1;
};

inline OracleMetrics oracle_metrics(const Matrix3& m) {
  OracleMetrics o{};
  for (int c = 0; c < 3; ++c) {
    double row = 0, col = 0;
    for (int j = 0; j < 3; ++j) row += m[c][j], col += m[j][c];
    o.precision[c] = col ? m[c][c] / col : 0;
    o.recall[c] = row ? m[c][c] / row : 0;
    double s = o.precision[c] + o.recall[c];
    o.f1[c] = s ? 2 * o.precision[c] * o.recall[c] / s : 0;
  }
  o.macro_p = (o.precision[0] + o.precision[1] + o.precision[2]) / 3;
  o.macro_r = (o.recall[0] + o.recall[1] + o.recall[2]) / 3;
  o.macro_f1 = 2 * o.macro_p * o.macro_r / (o.macro_p + o.macro_r);
  o.mean_f1 = (o.f1[0] + o.f1[1] + o.f1[2]) / 3;
  return o;
}

}  // namespace testing
