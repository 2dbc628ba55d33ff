#include <algorithm>
#include <cerrno>
#include <chrono>
#include <csignal>
#include <cstring>
#include <thread>

#include <fcntl.h>
#include <poll.h>
#include <sys/wait.h>
#include <unistd.h>

#include <fmt/format.h>

#include "asrbench/adapters.hpp"
#include "asrbench/error.hpp"
#include "json.hpp"
#include "wire.hpp"

namespace asrbench {
namespace {

using nlohmann::json;
using nlohmann::ordered_json;

constexpr int kProtocolVersion = 1;

void close_fd(int& fd) noexcept {
  if (fd >= 0) ::close(fd);
  fd = -1;
}

void ignore_sigpipe() {
  // A child that dies mid-write must surface as a transport error, not kill us.
  static const bool done = [] {
    struct sigaction sa {};
    sa.sa_handler = SIG_IGN;
    ::sigaction(SIGPIPE, &sa, nullptr);
    return true;
  }();
  (void)done;
}

json parse_reply(const std::string& line) {
  json reply;
  try {
    reply = json::parse(line);
  } catch (const json::parse_error& e) {
    throw ProtocolError(fmt::format("adapter sent malformed JSON: {}", e.what()));
  }
  if (!reply.is_object() || !reply.contains("op") || !reply["op"].is_string()) {
    throw ProtocolError("adapter reply lacks an \"op\" field");
  }
  return reply;
}

}  // namespace

std::vector<TranscriptionResponse> decode_result_body(const json& reply) try {
  const std::string op = reply.value("op", "");
  if (op == "error") {
    const std::string kind = reply.value("kind", "fatal");
    const std::string msg = reply.contains("msg") && reply["msg"].is_string() ? reply["msg"].get<std::string>() : "";
    if (kind == "capacity") throw CapacityError(msg.empty() ? "batch too large" : msg);
    throw FatalAdapterError(msg.empty() ? "adapter reported a fatal error" : msg);
  }
  if (op != "result") throw ProtocolError(fmt::format("unexpected op \"{}\" from adapter", op));
  const auto items = reply.find("items");
  if (items == reply.end() || !items->is_array()) throw ProtocolError("result lacks an \"items\" array");
  std::vector<TranscriptionResponse> out;
  out.reserve(items->size());
  for (const auto& item : *items) {
    if (!item.is_object() || !item.contains("id") || !item["id"].is_string()) {
      throw ProtocolError("result item lacks a string \"id\"");
    }
    TranscriptionResponse r;
    r.sample_id = item["id"].get<std::string>();
    if (const auto text = item.find("text"); text != item.end() && text->is_string()) {
      r.hypothesis = text->get<std::string>();
    } else if (text != item.end() && !text->is_null()) {
      throw ProtocolError(fmt::format("result item {} has a non-string \"text\"", r.sample_id));
    }
    if (const auto ms = item.find("infer_ms"); ms != item.end() && ms->is_number()) r.backend_infer_ms = ms->get<double>();
    out.push_back(std::move(r));
  }
  return out;
} catch (const json::exception& e) {
  throw ProtocolError(fmt::format("malformed adapter reply: {}", e.what()));
}

SubprocessAdapter::SubprocessAdapter(std::string command, double timeout_s)
    : command_(std::move(command)), timeout_s_(timeout_s) {}

SubprocessAdapter::~SubprocessAdapter() { shutdown(); }

std::string SubprocessAdapter::name() const { return remote_name_.empty() ? "subprocess" : remote_name_; }

void SubprocessAdapter::spawn() {
  ignore_sigpipe();
  int in_pipe[2];   // harness -> child stdin
  int out_pipe[2];  // child stdout -> harness
  if (::pipe2(in_pipe, O_CLOEXEC) != 0) throw TransportError(fmt::format("pipe: {}", std::strerror(errno)));
  if (::pipe2(out_pipe, O_CLOEXEC) != 0) {
    ::close(in_pipe[0]);
    ::close(in_pipe[1]);
    throw TransportError(fmt::format("pipe: {}", std::strerror(errno)));
  }
  const pid_t pid = ::fork();
  if (pid < 0) {
    for (int fd : {in_pipe[0], in_pipe[1], out_pipe[0], out_pipe[1]}) ::close(fd);
    throw TransportError(fmt::format("fork: {}", std::strerror(errno)));
  }
  if (pid == 0) {
    ::dup2(in_pipe[0], STDIN_FILENO);
    ::dup2(out_pipe[1], STDOUT_FILENO);
    ::execl("/bin/sh", "sh", "-c", command_.c_str(), static_cast<char*>(nullptr));
    ::_exit(127);
  }
  ::close(in_pipe[0]);
  ::close(out_pipe[1]);
  pid_ = pid;
  to_child_ = in_pipe[1];
  from_child_ = out_pipe[0];
}

void SubprocessAdapter::write_line(const std::string& line) {
  std::string data = line + '\n';
  std::size_t off = 0;
  while (off < data.size()) {
    const ssize_t n = ::write(to_child_, data.data() + off, data.size() - off);
    if (n < 0) {
      if (errno == EINTR) continue;
      throw TransportError(fmt::format("write to adapter failed: {}", std::strerror(errno)));
    }
    off += static_cast<std::size_t>(n);
  }
}

std::string SubprocessAdapter::read_line() {
  using namespace std::chrono;
  const auto deadline = steady_clock::now() + duration_cast<steady_clock::duration>(duration<double>(timeout_s_));
  for (;;) {
    if (const auto nl = buffer_.find('\n'); nl != std::string::npos) {
      std::string line = buffer_.substr(0, nl);
      buffer_.erase(0, nl + 1);
      if (!line.empty() && line.back() == '\r') line.pop_back();
      return line;
    }
    const auto remaining = duration_cast<milliseconds>(deadline - steady_clock::now()).count();
    if (remaining <= 0) throw TimeoutError(fmt::format("adapter did not reply within {} s", timeout_s_));
    pollfd pfd{from_child_, POLLIN, 0};
    const int ready = ::poll(&pfd, 1, static_cast<int>(std::min<long long>(remaining, 60'000)));
    if (ready < 0) {
      if (errno == EINTR) continue;
      throw TransportError(fmt::format("poll failed: {}", std::strerror(errno)));
    }
    if (ready == 0) continue;
    char chunk[65536];
    const ssize_t n = ::read(from_child_, chunk, sizeof(chunk));
    if (n < 0) {
      if (errno == EINTR) continue;
      throw TransportError(fmt::format("read from adapter failed: {}", std::strerror(errno)));
    }
    if (n == 0) throw TransportError("adapter process closed its output");
    buffer_.append(chunk, static_cast<std::size_t>(n));
  }
}

void SubprocessAdapter::prepare() {
  if (handshaken_) return;
  if (pid_ < 0) spawn();
  write_line(R"({"op":"hello","version":1})");
  const json reply = parse_reply(read_line());
  if (reply["op"] != "hello") throw ProtocolError(fmt::format("expected hello, got {}", reply["op"].dump()));
  if (!reply.contains("version") || reply["version"] != kProtocolVersion) {
    throw ProtocolError(fmt::format("unsupported adapter protocol version {}", reply.value("version", json()).dump()));
  }
  remote_name_ = reply.contains("name") && reply["name"].is_string() ? reply["name"].get<std::string>() : "subprocess";
  handshaken_ = true;
}

std::vector<TranscriptionResponse> SubprocessAdapter::transcribe_batch(std::span<const TranscriptionRequest> requests) {
  prepare();
  ordered_json msg;
  msg["op"] = "transcribe";
  msg["items"] = ordered_json::array();
  for (const auto& r : requests) {
    ordered_json item;
    item["id"] = r.sample_id;
    item["audio"] = r.audio_path;
    item["language"] = r.language_hint ? ordered_json(*r.language_hint) : ordered_json(nullptr);
    msg["items"].push_back(std::move(item));
  }
  write_line(msg.dump());
  return associate_responses(requests, decode_result_body(parse_reply(read_line())));
}

void SubprocessAdapter::shutdown() noexcept {
  if (pid_ < 0) return;
  if (to_child_ >= 0) {
    const char bye[] = "{\"op\":\"bye\"}\n";
    (void)!::write(to_child_, bye, sizeof(bye) - 1);
  }
  close_fd(to_child_);
  int status = 0;
  bool reaped = false;
  for (int i = 0; i < 200 && !reaped; ++i) {
    const pid_t r = ::waitpid(pid_, &status, WNOHANG);
    reaped = r == pid_ || (r < 0 && errno != EINTR);
    if (!reaped) std::this_thread::sleep_for(std::chrono::milliseconds(10));
  }
  if (!reaped) {
    ::kill(pid_, SIGKILL);
    ::waitpid(pid_, &status, 0);
  }
  close_fd(from_child_);
  pid_ = -1;
}

}  // namespace asrbench
