#include "judgekit/gateway.hpp"

#include <condition_variable>
#include <cstdlib>
#include <thread>

#include <nlohmann/json.hpp>

#include <httplib.h>

#include "judgekit/hash.hpp"

namespace judgekit {

std::string chat_complete(ChatGateway& gateway, const PromptBundle& prompt) {
    return gateway.complete(prompt);
}

// ---- HttpGateway ----

class HttpGateway::InFlightGate {
public:
    explicit InFlightGate(int limit) : available_(limit) {}

    void acquire() {
        std::unique_lock lock(mutex_);
        cv_.wait(lock, [&] { return available_ > 0; });
        --available_;
    }

    void release() {
        {
            std::lock_guard lock(mutex_);
            ++available_;
        }
        cv_.notify_one();
    }

private:
    std::mutex mutex_;
    std::condition_variable cv_;
    int available_;
};

namespace {

struct SplitUrl {
    std::string base;  // scheme://host[:port]
    std::string path;
};

SplitUrl split_url(const std::string& url) {
    const auto scheme_end = url.find("://");
    if (scheme_end == std::string::npos) {
        throw Error("endpoint url '" + url + "' has no scheme");
    }
    const auto path_start = url.find('/', scheme_end + 3);
    if (path_start == std::string::npos) {
        return {url, "/v1/chat/completions"};
    }
    return {url.substr(0, path_start), url.substr(path_start)};
}

nlohmann::json request_body(const GatewayConfig& config, const PromptBundle& prompt) {
    nlohmann::json messages = nlohmann::json::array();
    messages.push_back({{"role", "system"}, {"content", prompt.system}});
    for (const auto& turn : prompt.turns) {
        messages.push_back({{"role", turn.role}, {"content", turn.text}});
    }
    return {{"model", config.model_name},
            {"messages", std::move(messages)},
            {"temperature", config.temperature}};
}

bool is_timeout(httplib::Error err) {
    return err == httplib::Error::ConnectionTimeout || err == httplib::Error::Read ||
           err == httplib::Error::Write;
}

}  // namespace

HttpGateway::HttpGateway(GatewayConfig config)
    : config_(std::move(config)), gate_(std::make_unique<InFlightGate>(
                                      config_.max_in_flight > 0 ? config_.max_in_flight : 1)) {
    const auto split = split_url(config_.endpoint_url);
    host_ = split.base;
    path_ = split.path;
}

HttpGateway::~HttpGateway() = default;

std::string HttpGateway::complete(const PromptBundle& prompt) {
    std::string api_key;
    if (!config_.api_key_env.empty()) {
        const char* key = std::getenv(config_.api_key_env.c_str());
        if (key == nullptr || *key == '\0') {
            throw GatewayError(GatewayErrorKind::auth, "environment variable '" +
                                                           config_.api_key_env +
                                                           "' is unset; cannot authenticate");
        }
        api_key = key;
    }

    const std::string body = request_body(config_, prompt).dump();

    gate_->acquire();
    struct Release {
        InFlightGate* gate;
        ~Release() { gate->release(); }
    } release{gate_.get()};

    std::string last_error;
    GatewayErrorKind last_kind = GatewayErrorKind::transport;
    for (int attempt = 0; attempt <= config_.max_retries; ++attempt) {
        if (attempt > 0) {
            std::this_thread::sleep_for(config_.retry_backoff * (1 << (attempt - 1)));
        }

        httplib::Client client(host_);
        const auto timeout_s =
            std::chrono::duration_cast<std::chrono::seconds>(config_.timeout);
        client.set_connection_timeout(timeout_s.count(), 0);
        client.set_read_timeout(timeout_s.count(), 0);
        client.set_write_timeout(timeout_s.count(), 0);
        httplib::Headers headers;
        if (!api_key.empty()) {
            headers.emplace("Authorization", "Bearer " + api_key);
        }

        auto result = client.Post(path_, headers, body, "application/json");
        if (!result) {
            last_kind = is_timeout(result.error()) ? GatewayErrorKind::timeout
                                                   : GatewayErrorKind::transport;
            last_error = "request to " + host_ + " failed: " + httplib::to_string(result.error());
            continue;  // transient: retry with backoff
        }
        if (result->status >= 500) {
            last_kind = GatewayErrorKind::http_status;
            last_error = "server returned status " + std::to_string(result->status);
            continue;
        }
        if (result->status != 200) {
            throw GatewayError(GatewayErrorKind::http_status,
                               "server returned status " + std::to_string(result->status) + ": " +
                                   result->body);
        }

        try {
            const auto reply = nlohmann::json::parse(result->body);
            return reply.at("choices").at(0).at("message").at("content").get<std::string>();
        } catch (const nlohmann::json::exception& e) {
            throw GatewayError(GatewayErrorKind::transport,
                               std::string("malformed completion body: ") + e.what());
        }
    }
    throw GatewayError(last_kind, last_error + " (after " +
                                      std::to_string(config_.max_retries + 1) + " attempts)");
}

// ---- ScriptedGateway ----

ScriptedGateway::ScriptedGateway(GatewayConfig config) : config_(std::move(config)) {
    default_rule_.replies = {"Rating: 3"};
}

ScriptedGateway& ScriptedGateway::script(std::string needle, std::vector<std::string> replies) {
    std::lock_guard lock(mutex_);
    rules_.push_back(Rule{std::move(needle), std::move(replies)});
    return *this;
}

ScriptedGateway& ScriptedGateway::script_default(std::vector<std::string> replies) {
    std::lock_guard lock(mutex_);
    default_rule_.replies = std::move(replies);
    default_rule_.next = 0;
    return *this;
}

ScriptedGateway& ScriptedGateway::script_error(std::string needle, GatewayErrorKind kind) {
    std::lock_guard lock(mutex_);
    Rule rule;
    rule.needle = std::move(needle);
    rule.fail = true;
    rule.fail_kind = kind;
    rules_.push_back(std::move(rule));
    return *this;
}

std::string ScriptedGateway::complete(const PromptBundle& prompt) {
    const std::string text = prompt.flattened();
    std::lock_guard lock(mutex_);
    ++calls_;
    Rule* rule = &default_rule_;
    for (auto& candidate : rules_) {
        if (text.find(candidate.needle) != std::string::npos) {
            rule = &candidate;
            break;
        }
    }
    if (rule->fail) {
        throw GatewayError(rule->fail_kind, "scripted failure for '" + rule->needle + "'");
    }
    if (rule->replies.empty()) {
        throw GatewayError(GatewayErrorKind::transport, "scripted rule has no replies");
    }
    const std::size_t idx = std::min(rule->next, rule->replies.size() - 1);
    ++rule->next;
    return rule->replies[idx];
}

int ScriptedGateway::calls() const {
    std::lock_guard lock(mutex_);
    return calls_;
}

// ---- HashMockGateway ----

HashMockGateway::HashMockGateway(GatewayConfig config) : config_(std::move(config)) {}

std::string HashMockGateway::complete(const PromptBundle& prompt) {
    const std::string text = prompt.flattened();
    const std::uint64_t h = fnv1a64(config_.model_name + "\x1f" + text);

    static constexpr std::string_view kObservations[] = {
        "The response tracks the visible content closely.",
        "The response covers the main event but misses a detail.",
        "The response is partially grounded and partially speculative.",
        "The response contradicts what the question implies.",
        "The response describes content that is not supported.",
    };

    if (text.find("Rating: <1-5>") != std::string::npos) {
        const int rating = 1 + static_cast<int>(h % 5);
        const auto& note = kObservations[(h >> 8) % 5];
        return std::string(note) + "\nRating: " + std::to_string(rating);
    }
    return "Observed answer " + to_hex(h).substr(0, 8) + " for: " +
           (prompt.turns.empty() ? std::string() : prompt.turns.front().text.substr(0, 80));
}

std::unique_ptr<ChatGateway> make_gateway(const GatewayConfig& config) {
    if (config.endpoint_url.rfind("mock://", 0) == 0) {
        return std::make_unique<HashMockGateway>(config);
    }
    if (config.endpoint_url.rfind("http://", 0) == 0 ||
        config.endpoint_url.rfind("https://", 0) == 0) {
        return std::make_unique<HttpGateway>(config);
    }
    throw Error("unsupported endpoint url '" + config.endpoint_url +
                "' (expected http(s):// or mock://)");
}

// ---- ConfigGatewayProvider ----

ConfigGatewayProvider::ConfigGatewayProvider(
    std::unordered_map<std::string, GatewayConfig> configs, std::optional<GatewayConfig> fallback)
    : configs_(std::move(configs)), fallback_(std::move(fallback)) {}

ChatGateway& ConfigGatewayProvider::gateway_for(const std::string& id) {
    std::lock_guard lock(mutex_);
    if (auto it = cache_.find(id); it != cache_.end()) {
        return *it->second;
    }
    GatewayConfig config;
    if (auto it = configs_.find(id); it != configs_.end()) {
        config = it->second;
    } else if (fallback_.has_value()) {
        config = *fallback_;
        config.model_name = id;
        if (config.endpoint_url.rfind("mock://", 0) == 0) {
            config.endpoint_url = "mock://" + id;
        }
    } else {
        throw Error("no gateway configured for '" + id + "'");
    }
    auto [it, _] = cache_.emplace(id, make_gateway(config));
    return *it->second;
}

}  // namespace judgekit
