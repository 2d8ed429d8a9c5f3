#pragma once

#include <string>
#include <vector>

namespace depscope {

enum class Severity { Info, Warning, Error };

struct Diagnostic {
  Severity severity = Severity::Warning;
  std::string code;     // stable machine-readable id, e.g. "unresolved-property"
  std::string context;  // file path, class name, ... whatever locates the event
  std::string message;
};

// Append-only collector passed through the extraction and analysis layers.
class DiagnosticSink {
 public:
  void add(Severity sev, std::string code, std::string context, std::string message) {
    items_.push_back({sev, std::move(code), std::move(context), std::move(message)});
  }
  void info(std::string code, std::string ctx, std::string msg) {
    add(Severity::Info, std::move(code), std::move(ctx), std::move(msg));
  }
  void warn(std::string code, std::string ctx, std::string msg) {
    add(Severity::Warning, std::move(code), std::move(ctx), std::move(msg));
  }
  void error(std::string code, std::string ctx, std::string msg) {
    add(Severity::Error, std::move(code), std::move(ctx), std::move(msg));
  }

  const std::vector<Diagnostic>& items() const { return items_; }
  bool empty() const { return items_.empty(); }
  std::size_t count(const std::string& code) const {
    std::size_t n = 0;
    for (const auto& d : items_)
      if (d.code == code) ++n;
    return n;
  }

 private:
  std::vector<Diagnostic> items_;
};

}  // namespace depscope
