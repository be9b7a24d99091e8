#pragma once

#include "laudit/cache.hpp"
#include "laudit/prompt.hpp"

#include <atomic>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <semaphore>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace laudit::gateway {

/// One scored token. logprob is a natural log, <= 0.
struct TokenScore {
    std::string token;
    double logprob = 0.0;
    /// Next-position alternatives as (token, probability), most probable first.
    std::vector<std::pair<std::string, double>> top_alternatives;
};

/// Per-position log-probability and the mean/stddev of log-probabilities
/// over the full next-token distribution at that position.
struct TokenStats {
    std::string token;
    double logprob = 0.0;
    double mean = 0.0;
    double stddev = 0.0;
};

struct Continuation {
    std::string text;
    /// step_max_probs[i] = max_w P(w | prefix, first i generated tokens).
    /// A step that ends generation with end-of-text is included.
    std::vector<double> step_max_probs;
};

enum class BackendKind { HttpTarget, HttpAuxiliary, NgramSim, ScriptedAux };

std::string_view to_string(BackendKind kind);

enum class Capability : unsigned {
    TokenLogprobs = 1u << 0,
    FullVocabStats = 1u << 1,
    Continuation = 1u << 2,
    Rewrite = 1u << 3,
};

class Capabilities {
public:
    constexpr Capabilities() = default;
    constexpr Capabilities(std::initializer_list<Capability> caps) {
        for (auto c : caps) bits_ |= static_cast<unsigned>(c);
    }
    constexpr bool has(Capability c) const { return (bits_ & static_cast<unsigned>(c)) != 0; }
    std::vector<std::string> names() const;

private:
    unsigned bits_ = 0;
};

std::string_view to_string(Capability cap);

/// The raw model behind a handle. Every method defaults to throwing
/// CapabilityError; backends override what they support. Implementations
/// must be safe to call concurrently.
class Backend {
public:
    virtual ~Backend() = default;

    virtual std::vector<TokenScore> score_tokens(std::string_view text, const std::optional<std::string>& prefix,
                                                 int top_k) const;
    virtual std::vector<TokenStats> token_stats(std::string_view text, const std::optional<std::string>& prefix) const;
    virtual Continuation generate(std::string_view prefix, int max_tokens) const;
    virtual std::string rewrite(std::string_view prompt, std::string_view text) const;
    virtual std::string instruct(std::string_view instruction, std::span<const std::string> materials) const;
};

/// Bounds the number of backend calls in flight across all handles sharing it.
class InFlightLimiter {
public:
    explicit InFlightLimiter(int limit);
    int limit() const noexcept { return limit_; }

    class Permit {
    public:
        explicit Permit(InFlightLimiter& l) : l_(l) { l_.sem_.acquire(); }
        ~Permit() { l_.sem_.release(); }
        Permit(const Permit&) = delete;
        Permit& operator=(const Permit&) = delete;

    private:
        InFlightLimiter& l_;
    };

private:
    int limit_;
    std::counting_semaphore<4096> sem_;
};

/// Logical request counts (independent of cache state) plus physical
/// backend calls and cache hits.
struct CallStats {
    std::map<std::string, std::uint64_t> requests;
    std::uint64_t backend_calls = 0;
    std::uint64_t cache_hits = 0;
};

/// Uniform access to a target or auxiliary model: capability checks,
/// response caching, in-flight limiting and call accounting.
///
/// Handles are cheap to copy; copies share cache, limiter and counters.
class ModelHandle {
public:
    ModelHandle(BackendKind kind, std::string model_id, Capabilities caps, std::shared_ptr<const Backend> backend);

    BackendKind kind() const noexcept { return state_->kind; }
    const std::string& model_id() const noexcept { return state_->model_id; }
    Capabilities capabilities() const noexcept { return state_->caps; }
    bool has(Capability c) const noexcept { return state_->caps.has(c); }
    const Backend& backend() const noexcept { return *state_->backend; }

    void set_cache(std::shared_ptr<ResponseCache> cache) { state_->cache = std::move(cache); }
    void set_limiter(std::shared_ptr<InFlightLimiter> limiter) { state_->limiter = std::move(limiter); }
    const std::shared_ptr<ResponseCache>& cache() const noexcept { return state_->cache; }

    /// One TokenScore per token of `text` under teacher forcing, optionally
    /// conditioned on `prefix` (whose own tokens are not returned).
    std::vector<TokenScore> score_tokens(std::string_view text, const std::optional<std::string>& prefix = {},
                                         int top_k = 0) const;
    std::vector<TokenStats> token_stats(std::string_view text, const std::optional<std::string>& prefix = {}) const;

    /// Greedy continuation of `prefix` for at most max_tokens tokens.
    Continuation generate_continuation(std::string_view prefix, int max_tokens) const;

    /// Rewrite of `text` under `prompt`. An empty answer is retried once and
    /// then reported as a SampleError carrying `sample_id`.
    std::string rewrite(const RewritePrompt& prompt, std::string_view text, std::string_view sample_id = {}) const;

    /// Single free-text answer to `instruction` over `materials` (non-empty).
    std::string instruct(std::string_view instruction, std::span<const std::string> materials) const;

    CallStats stats() const;

private:
    void require(Capability c, std::string_view op) const;
    void count_request(const std::string& op) const;
    template <typename Fn>
    nlohmann::json cached(const std::string& op, const nlohmann::json& args, Fn&& compute) const;

    struct State {
        BackendKind kind;
        std::string model_id;
        Capabilities caps;
        std::shared_ptr<const Backend> backend;
        std::shared_ptr<ResponseCache> cache;
        std::shared_ptr<InFlightLimiter> limiter;
        mutable std::mutex stats_mutex;
        CallStats stats;
    };
    std::shared_ptr<State> state_;
};

}  // namespace laudit::gateway
