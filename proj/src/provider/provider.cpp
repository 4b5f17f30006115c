// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 ModelSelect Contributors

#include "modelselect/provider/provider.hpp"

#include <algorithm>
#include <cctype>
#include <map>

#include "modelselect/common/config.hpp"
#include "modelselect/common/io.hpp"
#include "modelselect/common/log.hpp"
#include "modelselect/common/text.hpp"

namespace modelselect::provider {

namespace {

constexpr TaskKind kAllKinds[] = {TaskKind::PhraseLabel, TaskKind::Definition, TaskKind::Sentiment,
                                  TaskKind::QualityMap};

std::string joined_tokens(std::string_view s) { return text::join(text::match_tokens(s), " "); }

std::vector<std::string> string_list(const nlohmann::json& j, const char* key)
{
    std::vector<std::string> out;
    if (!j.contains(key)) return out;
    if (!j.at(key).is_array()) throw Error(std::string("heuristic rules: '") + key + "' must be an array");
    for (const auto& item : j.at(key)) out.push_back(joined_tokens(item.get<std::string>()));
    return out;
}

std::set<std::string> string_set(const nlohmann::json& j, const char* key)
{
    auto list = string_list(j, key);
    return {list.begin(), list.end()};
}

std::vector<std::size_t> positions(const std::vector<std::string>& hay, const std::vector<std::string>& needle)
{
    std::vector<std::size_t> out;
    if (needle.empty() || needle.size() > hay.size()) return out;
    for (std::size_t i = 0; i + needle.size() <= hay.size(); ++i) {
        if (std::equal(needle.begin(), needle.end(), hay.begin() + static_cast<std::ptrdiff_t>(i))) out.push_back(i);
    }
    return out;
}

std::vector<std::string> sentences_of(std::string_view context)
{
    std::vector<std::string> out;
    std::string current;
    auto flush = [&] {
        auto t = text::trim(current);
        if (!t.empty()) out.push_back(text::collapse_whitespace(t));
        current.clear();
    };
    for (std::size_t i = 0; i < context.size(); ++i) {
        char c = context[i];
        if (c == '\n' && i + 1 < context.size() && context[i + 1] == '\n') {
            flush();
            continue;
        }
        current.push_back(c);
        bool terminal = c == '.' || c == '?' || c == '!';
        if (terminal && (i + 1 == context.size() || std::isspace(static_cast<unsigned char>(context[i + 1])) != 0)) {
            flush();
        }
    }
    flush();
    return out;
}

bool bounded(std::string_view s, std::size_t pos, std::size_t len)
{
    bool before = pos == 0 || !text::is_word_char(s[pos - 1]);
    bool after = pos + len >= s.size() || !text::is_word_char(s[pos + len]);
    return before && after;
}

}  // namespace

std::string_view to_string(TaskKind kind) noexcept
{
    switch (kind) {
    case TaskKind::PhraseLabel: return "phrase_label";
    case TaskKind::Definition: return "definition";
    case TaskKind::Sentiment: return "sentiment";
    case TaskKind::QualityMap: return "quality_map";
    }
    return "unknown";
}

bool is_classification(TaskKind kind) noexcept { return kind != TaskKind::Definition; }

std::optional<std::string> first_option_mentioned(std::string_view response, const std::vector<std::string>& options)
{
    auto lowered = text::to_lower(response);
    std::optional<std::string> best;
    std::size_t best_pos = std::string::npos;
    for (const auto& option : options) {
        auto needle = text::to_lower(option);
        if (needle.empty()) continue;
        for (auto pos = lowered.find(needle); pos != std::string::npos; pos = lowered.find(needle, pos + 1)) {
            if (!bounded(lowered, pos, needle.size())) continue;
            if (pos < best_pos || (pos == best_pos && best && needle.size() > best->size())) {
                best_pos = pos;
                best = option;
            }
            break;
        }
    }
    return best;
}

LabelResult label(const LabelTask& task, Backend& backend, int votes)
{
    if (votes < 1 || votes % 2 == 0) throw Error("vote count must be odd and at least 1, got " + std::to_string(votes));
    if (is_classification(task.kind) && task.options.empty()) throw Error("classification task without options");

    auto ask = [&](int vote) -> std::optional<std::string> {
        try {
            auto raw = backend.answer(task, vote);
            if (!is_classification(task.kind)) {
                auto cleaned = text::trim(raw);
                if (cleaned.empty()) return std::nullopt;
                return cleaned;
            }
            return first_option_mentioned(raw, task.options);
        } catch (const Error& e) {
            logger().warn("{} vote {} failed: {}", backend.name(), vote, e.what());
            return std::nullopt;
        }
    };

    LabelResult result;
    std::map<std::string, int> counts;
    for (int vote = 0; vote < votes; ++vote) {
        auto answer = ask(vote);
        if (!answer) answer = ask(vote);
        if (!answer) {
            throw ProviderError(backend.name() + ": no usable answer for " + std::string(to_string(task.kind)) +
                                " task on '" + task.candidate + "' after a retry (vote " + std::to_string(vote) + ")");
        }
        result.votes.push_back(*answer);
        ++counts[*answer];
    }
    int top = 0;
    for (const auto& [answer, count] : counts) {
        if (count > top) {  // map order makes the first maximum the smallest string
            top = count;
            result.answer = answer;
        }
    }
    result.confidence = static_cast<double>(top) / static_cast<double>(votes);
    return result;
}

std::string_view to_string(FusePolicy policy) noexcept
{
    switch (policy) {
    case FusePolicy::Union: return "union";
    case FusePolicy::Intersection: return "intersection";
    case FusePolicy::Majority: return "majority";
    }
    return "unknown";
}

FusePolicy fuse_policy_from_string(std::string_view name)
{
    for (auto p : {FusePolicy::Union, FusePolicy::Intersection, FusePolicy::Majority}) {
        if (text::iequals(to_string(p), name)) return p;
    }
    throw Error("unknown fuse policy '" + std::string(name) + "'");
}

std::set<std::string> fuse(const std::vector<std::set<std::string>>& per_system, FusePolicy policy)
{
    if (per_system.size() < 2) throw Error("fusing needs at least two systems");
    std::map<std::string, std::size_t> counts;
    for (const auto& answers : per_system) {
        for (const auto& a : answers) ++counts[a];
    }
    std::set<std::string> out;
    for (const auto& [answer, count] : counts) {
        bool keep = false;
        switch (policy) {
        case FusePolicy::Union: keep = true; break;
        case FusePolicy::Intersection: keep = count == per_system.size(); break;
        case FusePolicy::Majority: keep = 2 * count > per_system.size(); break;
        }
        if (keep) out.insert(answer);
    }
    return out;
}

HeuristicRules HeuristicRules::from_json(const nlohmann::json& j)
{
    HeuristicRules rules;
    const auto& phrase = j.contains("phrase") ? j.at("phrase") : nlohmann::json::object();
    rules.model_heads = string_set(phrase, "model_heads");
    rules.model_phrases = string_set(phrase, "model_phrases");
    rules.feature_cues = string_set(phrase, "feature_cues");
    rules.neither_tokens = string_set(phrase, "neither_tokens");
    const auto& sentiment = j.contains("sentiment") ? j.at("sentiment") : nlohmann::json::object();
    rules.positive_cues = string_list(sentiment, "positive");
    rules.negative_cues = string_list(sentiment, "negative");
    rules.negators = string_set(sentiment, "negators");
    if (j.contains("attribute")) {
        for (const auto& entry : j.at("attribute")) {
            auto name = text::normalize_phrase(entry.at("name").get<std::string>());
            rules.attribute_keywords.emplace_back(name, string_list(entry, "keywords"));
        }
    }
    return rules;
}

HeuristicRules HeuristicRules::load(const std::filesystem::path& path)
{
    return from_json(config::load_toml(path));
}

HeuristicBackend::HeuristicBackend(HeuristicRules rules) : rules_(std::move(rules)) {}

std::string HeuristicBackend::label_phrase(std::string_view phrase) const
{
    auto tokens = text::match_tokens(phrase);
    if (tokens.empty()) return "Neither";
    for (const auto& t : tokens) {
        if (rules_.neither_tokens.count(t) != 0) return "Neither";
    }
    if (rules_.model_phrases.count(text::join(tokens, " ")) != 0 || rules_.model_heads.count(tokens.back()) != 0) {
        return "Model";
    }
    for (const auto& t : tokens) {
        if (rules_.feature_cues.count(t) != 0) return "Feature";
    }
    return "Neither";
}

int HeuristicBackend::polarity(std::string_view sentence) const
{
    auto tokens = text::match_tokens(sentence);
    auto negated = [&](std::size_t pos) {
        for (std::size_t back = 1; back <= 2 && back <= pos; ++back) {
            if (rules_.negators.count(tokens[pos - back]) != 0) return true;
        }
        return false;
    };
    int score = 0;
    auto tally = [&](const std::vector<std::string>& cues, int sign) {
        for (const auto& cue : cues) {
            for (auto pos : positions(tokens, text::split(cue, ' '))) score += negated(pos) ? -sign : sign;
        }
    };
    tally(rules_.positive_cues, +1);
    tally(rules_.negative_cues, -1);
    return score;
}

std::optional<std::string> HeuristicBackend::attribute(std::string_view sentence) const
{
    auto tokens = text::match_tokens(sentence);
    std::optional<std::string> best;
    std::size_t best_hits = 0;
    for (const auto& [name, keywords] : rules_.attribute_keywords) {
        std::size_t hits = 0;
        for (const auto& k : keywords) hits += text::count_subsequence(tokens, text::split(k, ' '));
        if (hits > best_hits) {
            best_hits = hits;
            best = name;
        }
    }
    return best;
}

std::string HeuristicBackend::definition(std::string_view phrase, std::string_view context) const
{
    auto needle = text::match_tokens(phrase);
    auto sentences = sentences_of(context);
    for (const auto& s : sentences) {
        if (text::contains_subsequence(text::match_tokens(s), needle)) return s;
    }
    return sentences.empty() ? std::string() : sentences.front();
}

std::string HeuristicBackend::answer(const LabelTask& task, int /*vote*/)
{
    switch (task.kind) {
    case TaskKind::PhraseLabel: return label_phrase(task.candidate);
    case TaskKind::Definition: return definition(task.candidate, task.prompt_context);
    case TaskKind::Sentiment: {
        if (!attribute(task.candidate)) return "neutral";
        int p = polarity(task.candidate);
        return p > 0 ? "positive" : p < 0 ? "negative" : "neutral";
    }
    case TaskKind::QualityMap: {
        auto found = attribute(task.candidate);
        if (found) {
            for (const auto& option : task.options) {
                if (text::iequals(option, *found)) return option;
            }
        }
        return task.options.empty() ? std::string() : task.options.front();
    }
    }
    return {};
}

PromptTemplates PromptTemplates::load(const std::filesystem::path& dir)
{
    PromptTemplates out;
    for (auto kind : kAllKinds) {
        auto path = dir / (std::string(to_string(kind)) + ".txt");
        auto raw = io::read_file(path);
        std::string body;
        bool header = true;
        for (const auto& line : text::split(raw, '\n')) {
            if (header && !line.empty() && line.front() == '#') continue;
            header = false;
            body += line;
            body.push_back('\n');
        }
        out.by_kind[kind] = text::trim(body);
    }
    return out;
}

std::string PromptTemplates::render(const LabelTask& task) const
{
    auto it = by_kind.find(task.kind);
    if (it == by_kind.end()) throw Error("no prompt template for " + std::string(to_string(task.kind)));
    std::string out = it->second;
    auto replace_all = [&](const std::string& key, const std::string& value) {
        for (auto pos = out.find(key); pos != std::string::npos; pos = out.find(key, pos + value.size())) {
            out.replace(pos, key.size(), value);
        }
    };
    replace_all("{{context}}", task.prompt_context);
    replace_all("{{candidate}}", task.candidate);
    replace_all("{{options}}", text::join(task.options, ", "));
    return out;
}

ChatBackend::ChatBackend(std::shared_ptr<net::Transport> transport, ChatSettings settings, PromptTemplates templates)
    : transport_(std::move(transport)), settings_(std::move(settings)), templates_(std::move(templates))
{
    if (!transport_) throw Error("chat backend needs a transport");
}

net::HttpRequest ChatBackend::build_request(const LabelTask& task, int vote) const
{
    nlohmann::json body = {
        {"model", settings_.model},
        {"messages", nlohmann::json::array({{{"role", "user"}, {"content", templates_.render(task)}}})},
        {"temperature", 0},
        {"seed", settings_.seed + vote},
    };
    net::HttpRequest req;
    req.method = "POST";
    req.url = settings_.endpoint;
    req.body = body.dump();
    req.headers["Content-Type"] = "application/json";
    if (!settings_.api_key.empty()) req.headers["Authorization"] = "Bearer " + settings_.api_key;
    req.replay_tag = "vote-" + std::to_string(vote);
    return req;
}

std::string ChatBackend::answer(const LabelTask& task, int vote)
{
    auto response = transport_->send(build_request(task, vote));
    if (response.status != 200) {
        throw ProtocolError("chat endpoint answered HTTP " + std::to_string(response.status));
    }
    auto parsed = nlohmann::json::parse(response.body, nullptr, false);
    if (parsed.is_discarded() || !parsed.is_object() || !parsed.contains("choices") || !parsed["choices"].is_array() ||
        parsed["choices"].empty()) {
        throw ProtocolError("chat endpoint returned no choices: " + response.body.substr(0, 160));
    }
    const auto& message = parsed["choices"][0].value("message", nlohmann::json::object());
    if (!message.contains("content") || !message["content"].is_string()) {
        throw ProtocolError("chat choice has no text content");
    }
    return message["content"].get<std::string>();
}

ProviderConfig ProviderConfig::load(const std::filesystem::path& path)
{
    auto j = config::load_toml(path);
    ProviderConfig cfg;
    if (!j.contains("provider")) return cfg;
    const auto& p = j.at("provider");
    cfg.backend = p.value("backend", cfg.backend);
    cfg.votes = p.value("votes", cfg.votes);
    cfg.chat.endpoint = p.value("endpoint", std::string());
    cfg.chat.model = p.value("model", std::string());
    cfg.chat.seed = p.value("seed", cfg.chat.seed);
    cfg.api_key_env = p.value("api_key_env", cfg.api_key_env);
    if (p.contains("replay_dir")) {
        std::filesystem::path dir = p.at("replay_dir").get<std::string>();
        cfg.replay_dir = dir.is_absolute() ? dir : path.parent_path() / dir;
    }
    if (cfg.backend != "heuristic" && cfg.backend != "chat" && cfg.backend != "replay") {
        throw Error(path.string() + ": unknown provider backend '" + cfg.backend + "'");
    }
    if (cfg.votes < 1 || cfg.votes % 2 == 0) throw Error(path.string() + ": votes must be odd and at least 1");
    return cfg;
}

std::unique_ptr<Backend> make_backend(const ProviderConfig& config, const std::filesystem::path& resource_dir,
                                      std::shared_ptr<net::Transport> live_transport)
{
    if (config.backend == "heuristic") {
        return std::make_unique<HeuristicBackend>(HeuristicRules::load(resource_dir / "heuristic_rules.toml"));
    }
    auto templates = PromptTemplates::load(resource_dir / "prompts");
    auto settings = config.chat;
    settings.api_key = io::getenv_or(config.api_key_env.c_str(), "");
    if (config.backend == "replay") {
        if (config.replay_dir.empty()) throw Error("replay backend needs replay_dir");
        auto store = std::make_shared<net::ReplayStore>(config.replay_dir);
        auto transport = std::make_shared<net::ReplayTransport>(store, net::ReplayMode::Replay);
        return std::make_unique<ChatBackend>(transport, settings, templates);
    }
    if (settings.endpoint.empty()) throw Error("chat backend needs an endpoint");
    if (!live_transport) live_transport = std::make_shared<net::LiveTransport>();
    if (!config.replay_dir.empty()) {
        auto store = std::make_shared<net::ReplayStore>(config.replay_dir);
        live_transport = std::make_shared<net::ReplayTransport>(store, net::ReplayMode::Record, live_transport);
    }
    return std::make_unique<ChatBackend>(live_transport, settings, templates);
}

}  // namespace modelselect::provider
