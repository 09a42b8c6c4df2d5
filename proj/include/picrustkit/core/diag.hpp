#ifndef PICRUSTKIT_CORE_DIAG_HPP
#define PICRUSTKIT_CORE_DIAG_HPP

#include <functional>
#include <iostream>
#include <string>
#include <vector>

namespace picrustkit::diag {

enum class Level { info, warn, error };

using Sink = std::function<void(Level, const std::string&)>;

namespace detail {
inline Sink& sink() {
  static Sink s;  // empty = default stderr sink
  return s;
}
inline bool& quiet() {
  static bool q = false;
  return q;
}
inline const char* label(Level level) {
  switch (level) {
    case Level::info: return "info";
    case Level::warn: return "warn";
    default: return "error";
  }
}
}  // namespace detail

// Replaces the default stderr sink; pass nullptr to restore it. Tests use
// this to capture warnings.
inline void set_sink(Sink sink) { detail::sink() = std::move(sink); }

inline void set_quiet(bool quiet) { detail::quiet() = quiet; }

inline void emit(Level level, const std::string& message) {
  if (detail::sink()) {
    detail::sink()(level, message);
    return;
  }
  if (detail::quiet() && level != Level::error) return;
  std::cerr << "[" << detail::label(level) << "] " << message << "\n";
}

inline void info(const std::string& message) { emit(Level::info, message); }
inline void warn(const std::string& message) { emit(Level::warn, message); }
inline void error(const std::string& message) { emit(Level::error, message); }

// RAII capture of emitted diagnostics, for tests that assert on warnings.
class Capture {
 public:
  Capture() {
    set_sink([this](Level level, const std::string& message) {
      if (level == Level::warn) warnings.push_back(message);
      messages.push_back(message);
    });
  }
  ~Capture() { set_sink(nullptr); }
  Capture(const Capture&) = delete;
  Capture& operator=(const Capture&) = delete;

  std::vector<std::string> warnings;
  std::vector<std::string> messages;
};

}  // namespace picrustkit::diag

#endif  // PICRUSTKIT_CORE_DIAG_HPP
