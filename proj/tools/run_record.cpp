#include "run_record.hpp"

#include "ice/csv.hpp"

#include <chrono>
#include <ctime>
#include <iomanip>
#include <sstream>

#ifndef ICE_VERSION
#define ICE_VERSION "0.0.0"
#endif

namespace ice::cli {

int exit_code_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Io:
    case ErrorKind::MissingColumn:
    case ErrorKind::EmptyTrace:
    case ErrorKind::LengthMismatch:
      return kIoError;
    case ErrorKind::InvalidArgument:
    case ErrorKind::InvalidSpec:
    case ErrorKind::EmptyPrefix:
      return kBadFlags;
    default:
      return kFailure;
  }
}

std::uint64_t fnv1a64(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string hex64(std::uint64_t v) {
  std::ostringstream s;
  s << std::hex << std::setw(16) << std::setfill('0') << v;
  return s.str();
}

nlohmann::json error_record(const std::string& kind, const std::string& message, int exit_code,
                            const std::string& input) {
  nlohmann::json j{{"status", exit_code == kFailure ? "fail" : "error"},
                   {"exit_code", exit_code},
                   {"kind", kind},
                   {"message", message}};
  if (!input.empty()) j["input"] = input;
  return j;
}

RunRecord::RunRecord(std::string command, std::filesystem::path out_dir)
    : command_(std::move(command)), out_dir_(std::move(out_dir)) {
  std::error_code ec;
  std::filesystem::create_directories(out_dir_, ec);
  if (ec) throw CommandError(kIoError, "Io", "cannot create output directory " + out_dir_.string());
}

std::string RunRecord::read_input(const std::filesystem::path& path) {
  std::string text;
  try {
    text = detail::read_text_file(path);
  } catch (const Error& e) {
    throw CommandError(kIoError, std::string(to_string(e.kind())), e.what());
  }
  const std::lock_guard lock(mutex_);
  inputs_.emplace_back(path.string(), hex64(fnv1a64(text)));
  return text;
}

void RunRecord::write_output(const std::string& name, const std::string& text) {
  const std::filesystem::path path = out_dir_ / name;
  try {
    detail::write_text_file(path, text);
  } catch (const Error& e) {
    throw CommandError(kIoError, std::string(to_string(e.kind())), e.what());
  }
  const std::lock_guard lock(mutex_);
  outputs_.push_back(name);
}

void RunRecord::write_json(const std::string& name, const nlohmann::json& value) {
  write_output(name, value.dump(2) + "\n");
}

void RunRecord::note_error(const nlohmann::json& record) {
  const std::lock_guard lock(mutex_);
  errors_.push_back(record);
}

void RunRecord::finish(int exit_code) {
  std::sort(inputs_.begin(), inputs_.end());
  std::sort(outputs_.begin(), outputs_.end());
  nlohmann::json inputs = nlohmann::json::array();
  for (const auto& [path, hash] : inputs_) inputs.push_back({{"path", path}, {"fnv1a64", hash}});

  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm utc{};
  gmtime_r(&now, &utc);
  std::ostringstream stamp;
  stamp << std::put_time(&utc, "%Y-%m-%dT%H:%M:%SZ");

  const nlohmann::json manifest{{"command", command_},
                                {"version", ICE_VERSION},
                                {"config", config_},
                                {"inputs", inputs},
                                {"outputs", outputs_},
                                {"errors", errors_},
                                {"exit_code", exit_code},
                                {"created_at", stamp.str()}};
  // The manifest is best effort; a failure here must not mask the real
  // exit status.
  try {
    detail::write_text_file(out_dir_ / (command_ + "_manifest.json"), manifest.dump(2) + "\n");
  } catch (const Error&) {
  }
}

}  // namespace ice::cli
