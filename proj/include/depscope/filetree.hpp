#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace depscope {

// Read-only view of a project tree at some commit. Paths are '/'-separated
// and relative to the project root.
class FileTree {
 public:
  virtual ~FileTree() = default;
  virtual std::vector<std::string> list_files() const = 0;  // sorted
  virtual std::optional<std::string> read(const std::string& path) const = 0;
};

class DiskTree final : public FileTree {
 public:
  explicit DiskTree(std::string root) : root_(std::move(root)) {}
  std::vector<std::string> list_files() const override;
  std::optional<std::string> read(const std::string& path) const override;
  const std::string& root() const { return root_; }

 private:
  std::string root_;
};

class MemoryTree final : public FileTree {
 public:
  MemoryTree() = default;
  explicit MemoryTree(std::map<std::string, std::string> files) : files_(std::move(files)) {}
  void put(const std::string& path, std::string content) { files_[path] = std::move(content); }
  void remove(const std::string& path) { files_.erase(path); }
  std::vector<std::string> list_files() const override;
  std::optional<std::string> read(const std::string& path) const override;
  const std::map<std::string, std::string>& files() const { return files_; }

 private:
  std::map<std::string, std::string> files_;
};

}  // namespace depscope
