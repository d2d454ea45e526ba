#include "gnsm/ga_advisor.hpp"

#include "json_codec.hpp"

#include <algorithm>
#include <fstream>
#include <numeric>
#include <random>
#include <set>
#include <sstream>

namespace gnsm {

char advice_char(AdviceAction action) noexcept {
    switch (action) {
        case AdviceAction::escalate: return 'E';
        case AdviceAction::power_save: return 'P';
        case AdviceAction::hold: return 'H';
    }
    return 'H';
}

AdviceAction parse_advice_action(std::string_view text) {
    if (text == "E" || text == "escalate") return AdviceAction::escalate;
    if (text == "P" || text == "power_save") return AdviceAction::power_save;
    if (text == "H" || text == "hold") return AdviceAction::hold;
    throw ValidationError("unknown advice action '" + std::string(text) + "'");
}

std::string encode_genome(const Genome& genome) {
    std::string out;
    for (const auto& [id, act] : genome) {
        if (!out.empty()) out += '|';
        out += id.str();
        out += ':';
        out += advice_char(act);
    }
    return out;
}

Genome decode_genome(std::string_view text) {
    Genome genome;
    if (text.empty()) return genome;
    std::size_t begin = 0;
    while (begin <= text.size()) {
        auto end = text.find('|', begin);
        auto seg = text.substr(begin, end == std::string_view::npos ? std::string_view::npos : end - begin);
        auto colon = seg.rfind(':');
        if (colon == std::string_view::npos) throw ValidationError("genome segment without ':'");
        SensorId id{std::string(seg.substr(0, colon))};
        if (!genome.emplace(std::move(id), parse_advice_action(seg.substr(colon + 1))).second) {
            throw ValidationError("duplicate sensor in genome");
        }
        if (end == std::string_view::npos) break;
        begin = end + 1;
    }
    return genome;
}

double state_similarity(const NodeStateTable& a, const NodeStateTable& b) {
    std::set<SensorId> ids;
    for (const auto& [id, _] : a) ids.insert(id);
    for (const auto& [id, _] : b) ids.insert(id);
    if (ids.empty()) return 1.0;
    std::size_t mismatches = 0;
    for (const auto& id : ids) {
        auto ia = a.find(id);
        auto ib = b.find(id);
        if (ia == a.end() || ib == b.end() || ia->second.role != ib->second.role) ++mismatches;
    }
    return 1.0 - static_cast<double>(mismatches) / static_cast<double>(ids.size());
}

double action_match(const Genome& genome, const Genome& actions) {
    if (genome.empty()) return 0.0;
    std::size_t agree = 0;
    for (const auto& [id, act] : genome) {
        auto it = actions.find(id);
        if (it != actions.end() && it->second == act) ++agree;
    }
    return static_cast<double>(agree) / static_cast<double>(genome.size());
}

namespace {

double label_sign(EpisodeLabel label) { return label == EpisodeLabel::good ? 1.0 : -1.0; }

}  // namespace

FitnessEvaluator::FitnessEvaluator(const FitnessContext& context) : history_(context.history) {
    auto current = decode_system_string(context.current);
    similarity_.reserve(history_.size());
    for (const auto& ep : history_) similarity_.push_back(state_similarity(current, decode_system_string(ep.before)));
}

double FitnessEvaluator::operator()(const Genome& genome) const {
    double total = 0.0;
    for (std::size_t i = 0; i < history_.size(); ++i) {
        total += similarity_[i] * action_match(genome, history_[i].actions) * label_sign(history_[i].label);
    }
    return total;
}

double fitness(const Genome& genome, std::span<const LabeledEpisode> history, std::string_view current) {
    return FitnessEvaluator(FitnessContext{history, std::string(current)})(genome);
}

void validate(const GaParams& params) {
    if (params.pop_size < 2) throw ValidationError("GA population size must be >= 2");
    if (params.elitism_count < 1) throw ValidationError("GA elitism must be >= 1");
    if (params.elitism_count > params.pop_size) throw ValidationError("GA elitism larger than population");
    auto rate = [](double r) { return r >= 0.0 && r <= 1.0; };
    if (!rate(params.crossover_rate) || !rate(params.mutation_rate)) {
        throw ValidationError("GA rates must lie in [0,1]");
    }
}

std::vector<Genome> evolve(std::span<const Genome> population, const GaParams& params, std::uint64_t seed,
                           const FitnessContext& context) {
    validate(params);
    if (population.empty()) throw ValidationError("cannot evolve an empty population");
    for (const auto& g : population) {
        if (g.size() != population[0].size() ||
            !std::equal(g.begin(), g.end(), population[0].begin(),
                        [](const auto& a, const auto& b) { return a.first == b.first; })) {
            throw ValidationError("population genomes cover different sensors");
        }
    }

    FitnessEvaluator evaluate(context);
    std::vector<double> scores;
    scores.reserve(population.size());
    for (const auto& g : population) scores.push_back(evaluate(g));

    std::vector<std::size_t> ranked(population.size());
    std::iota(ranked.begin(), ranked.end(), 0);
    std::stable_sort(ranked.begin(), ranked.end(), [&](auto a, auto b) { return scores[a] > scores[b]; });

    std::vector<Genome> next;
    next.reserve(params.pop_size);
    std::vector<std::size_t> elites(ranked.begin(), ranked.begin() + std::min(params.elitism_count, ranked.size()));
    std::sort(elites.begin(), elites.end());
    for (auto i : elites) next.push_back(population[i]);

    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<std::size_t> pick(0, population.size() - 1);
    std::uniform_int_distribution<int> pick_action(0, 2);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    auto tournament = [&] {
        auto a = pick(rng);
        auto b = pick(rng);
        if (scores[b] > scores[a] || (scores[b] == scores[a] && b < a)) return b;
        return a;
    };

    while (next.size() < params.pop_size) {
        const Genome& mother = population[tournament()];
        const Genome& father = population[tournament()];
        Genome child = mother;
        if (unit(rng) < params.crossover_rate) {
            auto fit = father.begin();
            for (auto& [id, act] : child) {
                if (unit(rng) < 0.5) act = fit->second;
                ++fit;
            }
        }
        for (auto& [id, act] : child) {
            if (unit(rng) < params.mutation_rate) act = kAllAdviceActions[pick_action(rng)];
        }
        next.push_back(std::move(child));
    }
    return next;
}

std::vector<Genome> random_population(const std::vector<SensorId>& fleet, std::size_t size, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<int> pick_action(0, 2);
    std::vector<Genome> population(size);
    for (auto& g : population) {
        for (const auto& id : fleet) g[id] = kAllAdviceActions[pick_action(rng)];
    }
    return population;
}

std::vector<AdviceItem> advise(const NodeStateTable& current, std::span<const Genome> population,
                               std::span<const LabeledEpisode> history) {
    if (population.empty()) throw ValidationError("advice needs a non-empty population");
    std::vector<double> similarity;
    similarity.reserve(history.size());
    for (const auto& ep : history) similarity.push_back(state_similarity(current, decode_system_string(ep.before)));

    std::vector<AdviceItem> items;
    items.reserve(population.size());
    for (std::size_t g = 0; g < population.size(); ++g) {
        AdviceItem item;
        item.genome_index = g;
        for (const auto& [id, _] : current) {
            auto it = population[g].find(id);
            item.actions[id] = it == population[g].end() ? AdviceAction::hold : it->second;
        }
        for (std::size_t e = 0; e < history.size(); ++e) {
            double match = action_match(item.actions, history[e].actions);
            double term = similarity[e] * match * label_sign(history[e].label);
            item.fitness += term;
            if (term != 0.0) item.provenance.push_back({e, similarity[e], match, term});
        }
        items.push_back(std::move(item));
    }
    std::stable_sort(items.begin(), items.end(), [](const AdviceItem& a, const AdviceItem& b) { return a.fitness > b.fitness; });
    return items;
}

std::string episode_to_line(const LabeledEpisode& episode) {
    codec::json actions = codec::json::object();
    for (const auto& [id, act] : episode.actions) actions[id.str()] = std::string(1, advice_char(act));
    codec::json j{{"actions", actions},
                  {"alerts_confirmed", episode.alerts_confirmed},
                  {"before", episode.before},
                  {"energy_wh", episode.energy_wh},
                  {"label", episode.label == EpisodeLabel::good ? "good" : "bad"}};
    return j.dump() + "\n";
}

LabeledEpisode episode_from_line(std::string_view line) {
    auto j = codec::json::parse(line.begin(), line.end(), nullptr, false);
    if (j.is_discarded() || !j.is_object()) throw ValidationError("episode line is not a JSON object");
    try {
        LabeledEpisode ep;
        ep.before = j.at("before").get<std::string>();
        decode_system_string(ep.before);
        for (const auto& [id, act] : j.at("actions").items()) {
            ep.actions[SensorId(id)] = parse_advice_action(act.get<std::string>());
        }
        auto label = j.at("label").get<std::string>();
        if (label != "good" && label != "bad") throw ValidationError("episode label must be good or bad");
        ep.label = label == "good" ? EpisodeLabel::good : EpisodeLabel::bad;
        ep.alerts_confirmed = j.at("alerts_confirmed").get<std::uint64_t>();
        ep.energy_wh = j.at("energy_wh").get<double>();
        return ep;
    } catch (const codec::json::exception& e) {
        throw ValidationError(std::string("bad episode: ") + e.what());
    } catch (const StateStringError& e) {
        throw ValidationError(std::string("bad episode state: ") + e.what());
    }
}

void save_history(const std::filesystem::path& path, std::span<const LabeledEpisode> history) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw ValidationError("cannot write " + path.string());
    for (const auto& ep : history) out << episode_to_line(ep);
}

std::vector<LabeledEpisode> load_history(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ValidationError("cannot read " + path.string());
    std::vector<LabeledEpisode> out;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty()) out.push_back(episode_from_line(line));
    }
    return out;
}

std::string format_population(std::string_view system_string, std::span<const Genome> population) {
    std::string out;
    for (const auto& g : population) {
        out += system_string;
        out += '\t';
        out += encode_genome(g);
        out += '\n';
    }
    return out;
}

std::vector<Genome> parse_population(std::string_view text) {
    std::vector<Genome> out;
    std::istringstream in{std::string(text)};
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        auto tab = line.find('\t');
        if (tab == std::string::npos) throw ValidationError("population line without tab");
        out.push_back(decode_genome(std::string_view(line).substr(tab + 1)));
    }
    return out;
}

}  // namespace gnsm
