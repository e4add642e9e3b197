#pragma once

#include "ice/errors.hpp"

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <mutex>
#include <stdexcept>
#include <string>
#include <vector>

namespace ice::cli {

enum ExitCode : int { kOk = 0, kIoError = 1, kFailure = 2, kBadFlags = 3 };

// Raised by command bodies; carries the exit code and the machine-readable
// error record printed on stdout.
class CommandError : public std::runtime_error {
 public:
  CommandError(int exit_code, std::string kind, const std::string& message)
      : std::runtime_error(message), exit_code_(exit_code), kind_(std::move(kind)) {}

  [[nodiscard]] int exit_code() const noexcept { return exit_code_; }
  [[nodiscard]] const std::string& kind() const noexcept { return kind_; }

 private:
  int exit_code_;
  std::string kind_;
};

/// Exit code for a library error raised outside input loading.
int exit_code_for(ErrorKind kind);

std::uint64_t fnv1a64(const std::string& bytes);
std::string hex64(std::uint64_t v);

/// Bookkeeping for one invocation; finish() writes `<command>_manifest.json`.
class RunRecord {
 public:
  RunRecord(std::string command, std::filesystem::path out_dir);

  [[nodiscard]] const std::filesystem::path& out_dir() const noexcept { return out_dir_; }
  void set_config(nlohmann::json config) { config_ = std::move(config); }

  /// Reads an input file and records its hash.
  std::string read_input(const std::filesystem::path& path);
  /// Writes `text` to out_dir/name and records it.
  void write_output(const std::string& name, const std::string& text);
  void write_json(const std::string& name, const nlohmann::json& value);

  void note_error(const nlohmann::json& record);
  void finish(int exit_code);

 private:
  std::string command_;
  std::filesystem::path out_dir_;
  nlohmann::json config_ = nlohmann::json::object();
  std::vector<std::pair<std::string, std::string>> inputs_;  // path, hash
  std::vector<std::string> outputs_;
  nlohmann::json errors_ = nlohmann::json::array();
  std::mutex mutex_;
};

/// Wraps library calls that parse an input so their failures map to the I/O
/// exit code.
template <class F>
auto parse_input(const std::filesystem::path& path, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const Error& e) {
    throw CommandError(kIoError, std::string(to_string(e.kind())), path.string() + ": " + e.what());
  }
}

nlohmann::json error_record(const std::string& kind, const std::string& message, int exit_code,
                            const std::string& input = {});

}  // namespace ice::cli
