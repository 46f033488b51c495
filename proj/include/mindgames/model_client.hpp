#pragma once

// Chat-completion client for model persuaders and the model classifier.
// Endpoint, model and credentials come from the environment:
//   MINDGAMES_MODEL_URL          base URL, e.g. https://api.openai.com
//   MINDGAMES_MODEL_NAME         model identifier
//   MINDGAMES_MODEL_TEMPERATURE  optional; omitted from requests when unset
//   MINDGAMES_API_KEY            bearer token
// https endpoints need CPPHTTPLIB_OPENSSL_SUPPORT defined before inclusion.

#include <cstdlib>
#include <optional>
#include <string>

#include "httplib.h"
#include "mindgames/protocol.hpp"

namespace mindgames {

struct ModelEndpoint {
  std::string base_url;
  std::string path = "/v1/chat/completions";
  std::string model;
  std::optional<double> temperature;
  std::string api_key;
  int timeout_seconds = 120;

  static ModelEndpoint from_env() {
    const auto get = [](const char* name) -> std::string {
      const char* v = std::getenv(name);
      return v ? v : "";
    };
    ModelEndpoint e;
    e.base_url = get("MINDGAMES_MODEL_URL");
    e.model = get("MINDGAMES_MODEL_NAME");
    e.api_key = get("MINDGAMES_API_KEY");
    if (const std::string t = get("MINDGAMES_MODEL_TEMPERATURE"); !t.empty()) e.temperature = std::stod(t);
    if (e.base_url.empty() || e.model.empty())
      throw Error(ErrorCode::kModelUnavailable, "set MINDGAMES_MODEL_URL and MINDGAMES_MODEL_NAME");
    return e;
  }
};

class HttpModelClient final : public ModelClient {
 public:
  explicit HttpModelClient(ModelEndpoint endpoint) : endpoint_(std::move(endpoint)) {}

  std::string complete(const std::string& prompt) override {
    httplib::Client client(endpoint_.base_url);
    client.set_read_timeout(endpoint_.timeout_seconds, 0);
    if (!endpoint_.api_key.empty()) client.set_bearer_token_auth(endpoint_.api_key);
    Json body = {{"model", endpoint_.model},
                 {"messages", Json::array({{{"role", "user"}, {"content", prompt}}})}};
    if (endpoint_.temperature) body["temperature"] = *endpoint_.temperature;
    const auto res = client.Post(endpoint_.path, body.dump(), "application/json");
    if (!res) throw Error(ErrorCode::kModelUnavailable, "request failed: " + httplib::to_string(res.error()));
    if (res->status != 200)
      throw Error(ErrorCode::kModelUnavailable, "HTTP " + std::to_string(res->status) + ": " + res->body);
    try {
      const Json j = Json::parse(res->body);
      const Json& content = j.at("choices").at(0).at("message").at("content");
      return content.is_string() ? content.get<std::string>() : std::string();
    } catch (const Json::exception& e) {
      throw Error(ErrorCode::kModelUnavailable, std::string("unexpected response: ") + e.what());
    }
  }

 private:
  ModelEndpoint endpoint_;
};

}  // namespace mindgames
