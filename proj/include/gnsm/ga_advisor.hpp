#pragma once

/// @file ga_advisor.hpp
/// @brief Genetic-algorithm advisor over system-state strings.
///
/// A genome proposes one action per sensor. Its fitness is the
/// label-signed sum, over past analyst-labeled episodes, of
/// (state similarity to the current fleet) x (agreement with the episode's
/// actions). Advice is ranked and returned to the analyst, never applied.

#include "gnsm/core_types.hpp"

#include <cstdint>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace gnsm {

enum class AdviceAction : std::uint8_t { escalate, power_save, hold };

inline constexpr AdviceAction kAllAdviceActions[] = {AdviceAction::escalate, AdviceAction::power_save,
                                                     AdviceAction::hold};

char advice_char(AdviceAction action) noexcept;
AdviceAction parse_advice_action(std::string_view text);

using Genome = std::map<SensorId, AdviceAction>;

/// `s1:E|s2:H|s3:P`, in id order.
std::string encode_genome(const Genome& genome);
Genome decode_genome(std::string_view text);

enum class EpisodeLabel : std::uint8_t { good, bad };

struct LabeledEpisode {
    std::string before;  ///< system-state string at the start of the episode
    Genome actions;
    EpisodeLabel label = EpisodeLabel::good;
    std::uint64_t alerts_confirmed = 0;
    double energy_wh = 0.0;

    bool operator==(const LabeledEpisode&) const = default;
};

/// 1 - normalized Hamming distance over per-node role characters. Sensors
/// present on one side only count as mismatches; two empty fleets are
/// identical.
double state_similarity(const NodeStateTable& a, const NodeStateTable& b);

/// Fraction of the genome's sensors on which `actions` proposes the same action.
double action_match(const Genome& genome, const Genome& actions);

double fitness(const Genome& genome, std::span<const LabeledEpisode> history, std::string_view current);

struct GaParams {
    std::size_t pop_size = 32;
    double crossover_rate = 0.8;
    double mutation_rate = 0.05;
    std::size_t elitism_count = 2;
};

void validate(const GaParams& params);

/// History and current state that fitness is evaluated against.
struct FitnessContext {
    std::span<const LabeledEpisode> history;
    std::string current;
};

/// Precomputed per-episode similarity to the current state, so a population
/// can be scored without re-decoding strings.
class FitnessEvaluator {
public:
    explicit FitnessEvaluator(const FitnessContext& context);
    double operator()(const Genome& genome) const;
    std::span<const double> similarities() const noexcept { return similarity_; }

private:
    std::span<const LabeledEpisode> history_;
    std::vector<double> similarity_;
};

/// One generation: elites (top elitism_count by fitness) survive unchanged in
/// their original order, the rest are bred by size-2 tournaments, uniform
/// crossover per sensor slot and per-slot mutation. Deterministic in `seed`.
/// All genomes must cover the same sensors.
std::vector<Genome> evolve(std::span<const Genome> population, const GaParams& params, std::uint64_t seed,
                           const FitnessContext& context);

std::vector<Genome> random_population(const std::vector<SensorId>& fleet, std::size_t size, std::uint64_t seed);

struct EpisodeContribution {
    std::size_t episode = 0;
    double similarity = 0.0;
    double match = 0.0;
    double contribution = 0.0;
};

struct AdviceItem {
    Genome actions;
    double fitness = 0.0;
    std::size_t genome_index = 0;
    /// Episodes that contributed a non-zero term, with their terms.
    std::vector<EpisodeContribution> provenance;
};

/// Scores the population against `current` and returns it best-first (ties
/// by population index). Actions are restricted to the current fleet;
/// sensors a genome does not cover are proposed `hold`.
std::vector<AdviceItem> advise(const NodeStateTable& current, std::span<const Genome> population,
                               std::span<const LabeledEpisode> history);

std::string episode_to_line(const LabeledEpisode& episode);
LabeledEpisode episode_from_line(std::string_view line);
void save_history(const std::filesystem::path& path, std::span<const LabeledEpisode> history);
std::vector<LabeledEpisode> load_history(const std::filesystem::path& path);

/// One `<system-string>\t<genome>` line per genome.
std::string format_population(std::string_view system_string, std::span<const Genome> population);
std::vector<Genome> parse_population(std::string_view text);

}  // namespace gnsm
