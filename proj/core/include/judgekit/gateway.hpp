#pragma once

#include <chrono>
#include <memory>
#include <mutex>
#include <string>
#include <unordered_map>
#include <vector>

#include "judgekit/errors.hpp"
#include "judgekit/prompts.hpp"

namespace judgekit {

struct GatewayConfig {
    std::string endpoint_url;  // "http(s)://host[:port][/path]" or "mock://<name>"
    std::string model_name;
    std::string api_key_env;  // env var holding the bearer key; empty = unauthenticated
    int max_in_flight = 4;
    /// Re-query budget on top of the first attempt, shared by the transport
    /// retry loop and the parse-retry loop in judge_one (3 attempts total
    /// by default).
    int max_retries = 2;
    std::chrono::milliseconds timeout{30000};
    double temperature = 0.0;
    std::chrono::milliseconds retry_backoff{250};  // base of the exponential backoff
};

/// One chat-completion round trip. Implementations throw GatewayError with
/// a category of {timeout, http_status, transport, auth}.
class ChatGateway {
public:
    virtual ~ChatGateway() = default;

    virtual std::string complete(const PromptBundle& prompt) = 0;
    virtual const GatewayConfig& config() const = 0;
};

/// Sends the prompt through the gateway and returns the model's text reply.
std::string chat_complete(ChatGateway& gateway, const PromptBundle& prompt);

/// JSON chat-completions client over HTTP. Resolves the API key from the
/// environment before any network call; honors the configured timeout; and
/// retries transient transport errors (and 5xx statuses) with exponential
/// backoff. At most max_in_flight requests run concurrently.
class HttpGateway : public ChatGateway {
public:
    explicit HttpGateway(GatewayConfig config);
    ~HttpGateway() override;

    std::string complete(const PromptBundle& prompt) override;
    const GatewayConfig& config() const override { return config_; }

private:
    class InFlightGate;

    GatewayConfig config_;
    std::string host_;  // scheme://host[:port]
    std::string path_;
    std::unique_ptr<InFlightGate> gate_;
};

/// Test double driven by substring rules. The first rule whose needle
/// occurs in the flattened prompt wins; its replies are consumed in order
/// and the last one is sticky. Rules may also fail with a GatewayError.
/// Thread-safe; with needle-keyed rules, replies do not depend on call
/// interleaving.
class ScriptedGateway : public ChatGateway {
public:
    explicit ScriptedGateway(GatewayConfig config = {});

    ScriptedGateway& script(std::string needle, std::vector<std::string> replies);
    ScriptedGateway& script_default(std::vector<std::string> replies);
    ScriptedGateway& script_error(std::string needle, GatewayErrorKind kind);

    std::string complete(const PromptBundle& prompt) override;
    const GatewayConfig& config() const override { return config_; }

    int calls() const;

private:
    struct Rule {
        std::string needle;
        std::vector<std::string> replies;
        std::size_t next = 0;
        bool fail = false;
        GatewayErrorKind fail_kind = GatewayErrorKind::transport;
    };

    GatewayConfig config_;
    mutable std::mutex mutex_;
    std::vector<Rule> rules_;
    Rule default_rule_;
    int calls_ = 0;
};

/// Offline stand-in for a hosted model ("mock://" endpoints). The reply is
/// a pure function of the prompt text: prompts carrying the rating contract
/// get a short rationale plus a hash-derived "Rating: <n>" line, other
/// prompts get a descriptive sentence. Lets every pipeline stage run
/// end-to-end reproducibly with no model access.
class HashMockGateway : public ChatGateway {
public:
    explicit HashMockGateway(GatewayConfig config);

    std::string complete(const PromptBundle& prompt) override;
    const GatewayConfig& config() const override { return config_; }

private:
    GatewayConfig config_;
};

/// Builds the gateway implied by the config's endpoint scheme:
/// "mock://" -> HashMockGateway, "http(s)://" -> HttpGateway.
std::unique_ptr<ChatGateway> make_gateway(const GatewayConfig& config);

/// Resolves the gateway serving a given judge or candidate identity.
class GatewayProvider {
public:
    virtual ~GatewayProvider() = default;
    virtual ChatGateway& gateway_for(const std::string& id) = 0;
};

/// Provider over a fixed id -> config map with an optional fallback
/// template (its model_name is replaced by the requested id). Gateways are
/// created lazily and cached.
class ConfigGatewayProvider : public GatewayProvider {
public:
    ConfigGatewayProvider(std::unordered_map<std::string, GatewayConfig> configs,
                          std::optional<GatewayConfig> fallback = std::nullopt);

    ChatGateway& gateway_for(const std::string& id) override;

private:
    std::unordered_map<std::string, GatewayConfig> configs_;
    std::optional<GatewayConfig> fallback_;
    std::mutex mutex_;
    std::unordered_map<std::string, std::unique_ptr<ChatGateway>> cache_;
};

}  // namespace judgekit
