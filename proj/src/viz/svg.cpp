#include "picrustkit/viz/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "picrustkit/core/errors.hpp"
#include "picrustkit/core/text.hpp"

namespace picrustkit::viz {

std::string xml_escape(const std::string& raw) {
  std::string out;
  out.reserve(raw.size());
  for (char c : raw) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      case '\'': out += "&apos;"; break;
      default: out += c;
    }
  }
  return out;
}

SvgElement& SvgElement::attr(const std::string& key, const std::string& value) {
  attrs_.emplace_back(key, value);
  return *this;
}

SvgElement& SvgElement::attr(const std::string& key, double value, int precision) {
  attrs_.emplace_back(key, text::format_fixed(value, precision));
  return *this;
}

SvgElement& SvgElement::text(const std::string& content) {
  text_ = content;
  return *this;
}

SvgElement& SvgElement::child(const std::string& name) {
  children_.push_back(std::make_unique<SvgElement>(name));
  return *children_.back();
}

void SvgElement::render(std::string& out, int depth) const {
  const std::string indent(std::size_t(depth) * 2, ' ');
  out += indent + "<" + name_;
  for (const auto& [key, value] : attrs_) {
    out += " " + key + "=\"" + xml_escape(value) + "\"";
  }
  if (children_.empty() && text_.empty()) {
    out += "/>\n";
    return;
  }
  out += ">";
  if (!text_.empty()) {
    out += xml_escape(text_);
    out += "</" + name_ + ">\n";
    return;
  }
  out += "\n";
  for (const auto& c : children_) c->render(out, depth + 1);
  out += indent + "</" + name_ + ">\n";
}

SvgDocument::SvgDocument(int width_px, int height_px) {
  root_ = std::make_unique<SvgElement>("svg");
  root_->attr("xmlns", "http://www.w3.org/2000/svg")
      .attr("width", std::to_string(width_px))
      .attr("height", std::to_string(height_px))
      .attr("viewBox", "0 0 " + std::to_string(width_px) + " " + std::to_string(height_px));
}

std::string SvgDocument::render() const {
  std::string out = "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  root_->render(out, 0);
  return out;
}

double estimate_text_width(const std::string& content, double font_size) {
  // Fractions of the font size for a generic sans face; close enough for
  // layout and entirely platform-independent.
  auto char_width = [](char c) -> double {
    if (c == 'i' || c == 'l' || c == 'j' || c == 't' || c == 'f' || c == '.' || c == ',' ||
        c == ':' || c == ';' || c == '!' || c == '|' || c == '\'' || c == '(' || c == ')') {
      return 0.30;
    }
    if (c == ' ') return 0.28;
    if (c == 'r') return 0.37;
    if (c == 'm' || c == 'w' || c == 'M' || c == 'W') return 0.85;
    if (c >= '0' && c <= '9') return 0.55;
    if (c >= 'A' && c <= 'Z') return 0.70;
    if (c >= 'a' && c <= 'z') return 0.54;
    return 0.60;
  };
  double width = 0.0;
  for (char c : content) width += char_width(c);
  return width * font_size;
}

const std::vector<std::string>& palette_colors(const std::string& name) {
  // Okabe-Ito discrete palette, color-blind safe.
  static const std::vector<std::string> okabe_ito = {"#E69F00", "#56B4E9", "#009E73", "#F0E442",
                                                     "#0072B2", "#D55E00", "#CC79A7", "#999999"};
  if (name == "okabe_ito" || name.empty()) return okabe_ito;
  throw validation_error("unknown palette '" + name + "' (available: okabe_ito)");
}

std::string diverging_color(double value, double limit) {
  struct Rgb {
    double r, g, b;
  };
  // Blue -> near-white -> red.
  const Rgb low{0x21, 0x66, 0xAC};
  const Rgb mid{0xF7, 0xF7, 0xF7};
  const Rgb high{0xB2, 0x18, 0x2B};

  const double v = std::clamp(value, -limit, limit) / limit;  // [-1, 1]
  const Rgb& a = v < 0.0 ? low : high;
  const double t = std::fabs(v);
  const Rgb c{mid.r + (a.r - mid.r) * t, mid.g + (a.g - mid.g) * t, mid.b + (a.b - mid.b) * t};
  char buf[8];
  std::snprintf(buf, sizeof buf, "#%02X%02X%02X", int(std::lround(c.r)), int(std::lround(c.g)),
                int(std::lround(c.b)));
  return buf;
}

}  // namespace picrustkit::viz
