#define CPPHTTPLIB_OPENSSL_SUPPORT
#include "httplib.h"

#include <fstream>
#include <sstream>

#include <fmt/format.h>

#include "asrbench/adapters.hpp"
#include "asrbench/error.hpp"
#include "json.hpp"
#include "wire.hpp"

namespace asrbench {
namespace {

std::string read_audio(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FatalAdapterError(fmt::format("cannot read audio file: {}", path));
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

HttpAdapter::HttpAdapter(std::string endpoint, double timeout_s)
    : endpoint_(std::move(endpoint)), timeout_s_(timeout_s) {
  while (endpoint_.size() > 1 && endpoint_.back() == '/') endpoint_.pop_back();
  const auto scheme_end = endpoint_.find("://");
  if (scheme_end == std::string::npos) throw ConfigError(fmt::format("http adapter needs a URL, got {}", endpoint_));
  const auto path_start = endpoint_.find('/', scheme_end + 3);
  origin_ = endpoint_.substr(0, path_start);
  base_path_ = path_start == std::string::npos ? std::string{} : endpoint_.substr(path_start);
}

HttpAdapter::~HttpAdapter() = default;

std::string HttpAdapter::name() const { return "http"; }

std::vector<TranscriptionResponse> HttpAdapter::transcribe_batch(std::span<const TranscriptionRequest> requests) {
  nlohmann::ordered_json body;
  body["items"] = nlohmann::ordered_json::array();
  for (const auto& r : requests) {
    nlohmann::ordered_json item;
    item["id"] = r.sample_id;
    item["audio_b64"] = httplib::detail::base64_encode(read_audio(r.audio_path));
    item["language"] = r.language_hint ? nlohmann::ordered_json(*r.language_hint) : nlohmann::ordered_json(nullptr);
    body["items"].push_back(std::move(item));
  }

  httplib::Client client(origin_);
  const auto whole = std::chrono::duration<double>(timeout_s_);
  const auto secs = std::chrono::duration_cast<std::chrono::seconds>(whole);
  const auto usecs = std::chrono::duration_cast<std::chrono::microseconds>(whole - secs);
  client.set_connection_timeout(secs.count(), usecs.count());
  client.set_read_timeout(secs.count(), usecs.count());
  client.set_write_timeout(secs.count(), usecs.count());

  const auto res = client.Post(base_path_ + "/transcribe", body.dump(), "application/json");
  if (!res) {
    const auto err = res.error();
    const std::string what = fmt::format("POST {}/transcribe failed: {}", endpoint_, httplib::to_string(err));
    if (err == httplib::Error::ConnectionTimeout) throw TimeoutError(what);
    if (err == httplib::Error::Read) throw TimeoutError(what);
    throw TransportError(what);
  }
  if (res->status == 413) throw CapacityError(fmt::format("{} rejected the batch as too large (413)", endpoint_));
  nlohmann::json reply;
  try {
    reply = nlohmann::json::parse(res->body);
  } catch (const nlohmann::json::parse_error&) {
    if (res->status != 200) throw TransportError(fmt::format("{} answered HTTP {}", endpoint_, res->status));
    throw ProtocolError(fmt::format("{} returned a body that is not JSON", endpoint_));
  }
  if (!reply.is_object() || !reply.contains("op")) {
    if (res->status != 200) throw TransportError(fmt::format("{} answered HTTP {}", endpoint_, res->status));
    throw ProtocolError("reply lacks an \"op\" field");
  }
  return associate_responses(requests, decode_result_body(reply));
}

}  // namespace asrbench
