#include "tre/agent.hpp"

#include "tre/error.hpp"

#include <httplib.h>
#include <json.hpp>

#include <cstdlib>
#include <format>

namespace tre {

namespace {

constexpr std::string_view kPreamble =
    "You are a tabular analysis component. Respond only with the schema the task "
    "names; no prose, no markdown, no extra lines.";

class RemoteProvider final : public Provider {
  public:
    explicit RemoteProvider(RemoteConfig config) : config_(std::move(config)) {
        if (config_.endpoint.empty()) {
            raise(Errc::invalid_argument, "remote endpoint not configured");
        }
        std::size_t scheme = config_.endpoint.find("://");
        std::size_t host_start = scheme == std::string::npos ? 0 : scheme + 3;
        std::size_t path_start = config_.endpoint.find('/', host_start);
        host_ = config_.endpoint.substr(0, path_start);
        path_ = path_start == std::string::npos ? "/" : config_.endpoint.substr(path_start);
    }

    AgentResponse complete(const AgentRequest& request) override {
        nlohmann::json body = {
            {"model", config_.model},
            {"messages",
             {{{"role", "system"}, {"content", kPreamble}},
              {{"role", "user"}, {"content", render_prompt(request)}}}},
        };
        httplib::Client client(host_);
        client.set_read_timeout(config_.timeout_seconds, 0);
        client.set_connection_timeout(config_.timeout_seconds, 0);
        httplib::Headers headers;
        if (!config_.auth_token.empty()) {
            headers.emplace("Authorization", "Bearer " + config_.auth_token);
        }
        auto result = client.Post(path_, headers, body.dump(), "application/json");
        if (!result) {
            raise(Errc::transport, std::format("request to {} failed", config_.endpoint));
        }
        if (result->status != 200) {
            raise(Errc::transport, std::format("endpoint returned status {}", result->status));
        }
        std::string content;
        try {
            nlohmann::json doc = nlohmann::json::parse(result->body);
            content = doc.at("choices").at(0).at("message").at("content").get<std::string>();
        } catch (const nlohmann::json::exception& e) {
            raise(Errc::agent_protocol, std::format("response body not chat-shaped: {}", e.what()));
        }
        return parse_response(request, content);
    }

    std::string name() const override { return std::format("remote({})", config_.model); }

  private:
    RemoteConfig config_;
    std::string host_;
    std::string path_;
};

} // namespace

std::unique_ptr<Provider> make_remote_provider(RemoteConfig config) {
    return std::make_unique<RemoteProvider>(std::move(config));
}

RemoteConfig remote_config_from_env() {
    RemoteConfig config;
    if (const char* endpoint = std::getenv("TRE_REMOTE_ENDPOINT")) {
        config.endpoint = endpoint;
    }
    if (const char* model = std::getenv("TRE_REMOTE_MODEL")) {
        config.model = model;
    }
    if (const char* auth_env = std::getenv("TRE_REMOTE_AUTH_ENV")) {
        if (const char* token = std::getenv(auth_env)) {
            config.auth_token = token;
        }
    }
    return config;
}

} // namespace tre
