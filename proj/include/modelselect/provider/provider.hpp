// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 ModelSelect Contributors

#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "modelselect/common/error.hpp"
#include "modelselect/net/http.hpp"

namespace modelselect::provider {

class ProviderError : public Error {
  public:
    using Error::Error;
};

enum class TaskKind { PhraseLabel, Definition, Sentiment, QualityMap };

std::string_view to_string(TaskKind kind) noexcept;

/// Free-text answers are only allowed for definitions.
bool is_classification(TaskKind kind) noexcept;

struct LabelTask {
    TaskKind kind = TaskKind::PhraseLabel;
    std::string prompt_context;
    std::string candidate;
    std::vector<std::string> options;
};

struct LabelResult {
    std::string answer;
    double confidence = 0.0;
    std::vector<std::string> votes;

    friend bool operator==(const LabelResult&, const LabelResult&) = default;
};

class Backend {
  public:
    virtual ~Backend() = default;
    /// One raw answer. `vote` distinguishes repeated asks of the same task.
    virtual std::string answer(const LabelTask& task, int vote) = 0;
    virtual std::string name() const = 0;
};

/// Asks `votes` times (odd, >= 1). The most frequent answer wins, ties going to
/// the lexicographically smallest; confidence is its share of the votes. A
/// failed or off-list vote is retried once before ProviderError is raised.
LabelResult label(const LabelTask& task, Backend& backend, int votes = 3);

enum class FusePolicy { Union, Intersection, Majority };

std::string_view to_string(FusePolicy policy) noexcept;
FusePolicy fuse_policy_from_string(std::string_view name);

/// Set combination across systems; majority keeps answers present in more than
/// half of them. Needs at least two systems.
std::set<std::string> fuse(const std::vector<std::set<std::string>>& per_system, FusePolicy policy);

/// The option mentioned first in `response` (case-insensitive, on word
/// boundaries; the longer option wins at equal positions).
std::optional<std::string> first_option_mentioned(std::string_view response, const std::vector<std::string>& options);

/// Rule tables for the offline backend.
struct HeuristicRules {
    std::set<std::string> model_heads;     // last token of a model phrase
    std::set<std::string> model_phrases;   // whole phrases that name models
    std::set<std::string> feature_cues;    // any token marks a feature
    std::set<std::string> neither_tokens;  // any token rules the phrase out
    std::vector<std::string> positive_cues;
    std::vector<std::string> negative_cues;
    std::set<std::string> negators;
    std::vector<std::pair<std::string, std::vector<std::string>>> attribute_keywords;  // attribute order kept

    static HeuristicRules from_json(const nlohmann::json& j);
    static HeuristicRules load(const std::filesystem::path& path);
};

/// Deterministic lexicon backend; never fails and answers every vote alike.
class HeuristicBackend : public Backend {
  public:
    explicit HeuristicBackend(HeuristicRules rules);
    std::string answer(const LabelTask& task, int vote) override;
    std::string name() const override { return "heuristic"; }

    std::string label_phrase(std::string_view phrase) const;
    /// Net cue polarity: >0 positive, <0 negative; a cue preceded (within two
    /// tokens) by a negator counts the other way.
    int polarity(std::string_view sentence) const;
    /// Keyword hits per attribute; empty when no attribute keyword occurs.
    std::optional<std::string> attribute(std::string_view sentence) const;
    std::string definition(std::string_view phrase, std::string_view context) const;

  private:
    HeuristicRules rules_;
};

struct PromptTemplates {
    std::map<TaskKind, std::string> by_kind;

    /// prompts/<kind>.txt; leading '#' lines are comments.
    static PromptTemplates load(const std::filesystem::path& dir);
    /// Substitutes {{context}}, {{candidate}} and {{options}}.
    std::string render(const LabelTask& task) const;
};

struct ChatSettings {
    std::string endpoint;  // full URL of the chat-completion route
    std::string model;
    std::string api_key;   // sent as a bearer token when non-empty
    int seed = 7;
};

/// Minimal chat-completion client: one user message, temperature 0, seed
/// offset by the vote index. Wrap the transport in a ReplayTransport for
/// deterministic runs.
class ChatBackend : public Backend {
  public:
    ChatBackend(std::shared_ptr<net::Transport> transport, ChatSettings settings, PromptTemplates templates);
    std::string answer(const LabelTask& task, int vote) override;
    std::string name() const override { return "chat:" + settings_.model; }

    net::HttpRequest build_request(const LabelTask& task, int vote) const;

  private:
    std::shared_ptr<net::Transport> transport_;
    ChatSettings settings_;
    PromptTemplates templates_;
};

/// Backend selection from provider.toml:
/// [provider] backend = "heuristic" | "chat" | "replay", votes, endpoint, model,
/// api_key_env, seed, replay_dir (relative to the file).
struct ProviderConfig {
    std::string backend = "heuristic";
    int votes = 3;
    ChatSettings chat;
    std::string api_key_env = "MODELSELECT_LLM_KEY";
    std::filesystem::path replay_dir;

    static ProviderConfig load(const std::filesystem::path& path);
};

/// `resource_dir` holds heuristic_rules.toml and prompts/.
std::unique_ptr<Backend> make_backend(const ProviderConfig& config, const std::filesystem::path& resource_dir,
                                      std::shared_ptr<net::Transport> live_transport = nullptr);

}  // namespace modelselect::provider
