#ifndef PICRUSTKIT_VIZ_SVG_HPP
#define PICRUSTKIT_VIZ_SVG_HPP

#include <memory>
#include <string>
#include <utility>
#include <vector>

namespace picrustkit::viz {

// Minimal SVG writer with fully deterministic output: attributes render in
// insertion order, children in append order, 2-space indentation, LF line
// endings. No timestamps, no randomness.
class SvgElement {
 public:
  explicit SvgElement(std::string name) : name_(std::move(name)) {}

  SvgElement& attr(const std::string& key, const std::string& value);
  SvgElement& attr(const std::string& key, double value, int precision = 2);
  SvgElement& text(const std::string& content);

  SvgElement& child(const std::string& name);

  void render(std::string& out, int depth) const;

 private:
  std::string name_;
  std::vector<std::pair<std::string, std::string>> attrs_;
  std::vector<std::unique_ptr<SvgElement>> children_;
  std::string text_;
};

class SvgDocument {
 public:
  SvgDocument(int width_px, int height_px);

  SvgElement& root() { return *root_; }
  std::string render() const;

 private:
  std::unique_ptr<SvgElement> root_;
};

std::string xml_escape(const std::string& raw);

// Width of a string in pixels from a fixed per-character table (fractions of
// the font size), so layout never depends on platform font metrics.
double estimate_text_width(const std::string& content, double font_size);

// Discrete color-blind-safe palette (8 entries).
const std::vector<std::string>& palette_colors(const std::string& name);

// Diverging blue-white-red scale on [-limit, limit], linear RGB
// interpolation, inputs clipped to the limit.
std::string diverging_color(double value, double limit);

}  // namespace picrustkit::viz

#endif  // PICRUSTKIT_VIZ_SVG_HPP
