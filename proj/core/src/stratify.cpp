#include "polar/stratify.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "polar/prng.hpp"

namespace polar {

namespace {

/// Integer subset sizes for n items under the given ratios: floor shares
/// first, then the remainder goes to the largest fractional parts (ties to
/// the lower subset index).
std::vector<std::size_t> apportion(std::size_t n, const std::vector<double>& ratios) {
  const std::size_t k = ratios.size();
  std::vector<std::size_t> sizes(k);
  std::vector<double> frac(k);
  std::size_t assigned = 0;
  for (std::size_t j = 0; j < k; ++j) {
    double want = ratios[j] * static_cast<double>(n);
    sizes[j] = static_cast<std::size_t>(std::floor(want));
    frac[j] = want - std::floor(want);
    assigned += sizes[j];
  }
  std::vector<std::size_t> order(k);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return frac[a] > frac[b]; });
  for (std::size_t i = 0; assigned < n; ++i, ++assigned) {
    sizes[order[i % k]] += 1;
  }
  return sizes;
}

void require_gold(const Dataset& d) {
  if (!d.gold) {
    throw Error(errc::no_gold_labels, "splitting requires gold labels");
  }
}

/// Core of the binary stratified split over a set of post indices.
void binary_assign(const Dataset& d, const std::vector<std::size_t>& members,
                   const SplitSpec& spec, Rng& rng, std::vector<std::uint32_t>& assignment,
                   std::vector<std::string>& warnings) {
  std::vector<std::size_t> strata[2];
  for (std::size_t idx : members) {
    strata[d.gold->at(idx, 0)].push_back(idx);
  }
  for (int cls = 0; cls < 2; ++cls) {
    if (strata[cls].empty()) {
      warnings.push_back("class " + std::to_string(cls) + " has no members");
    }
  }
  for (int cls = 0; cls < 2; ++cls) {
    auto& stratum = strata[cls];
    fisher_yates_shuffle(stratum, rng);
    auto sizes = apportion(stratum.size(), spec.ratios);
    std::size_t cursor = 0;
    for (std::size_t j = 0; j < sizes.size(); ++j) {
      for (std::size_t i = 0; i < sizes[j]; ++i) {
        assignment[stratum[cursor++]] = static_cast<std::uint32_t>(j);
      }
    }
  }
}

/// Core of the greedy iterative stratification over a set of post indices.
void iterative_assign(const Dataset& d, const std::vector<std::size_t>& members,
                      const SplitSpec& spec, Rng& rng,
                      std::vector<std::uint32_t>& assignment) {
  const std::size_t n_labels = d.gold->cols();
  const std::size_t k = spec.ratios.size();

  std::vector<std::size_t> labeled;
  std::vector<std::size_t> unlabeled;
  std::vector<std::size_t> support(n_labels, 0);
  for (std::size_t idx : members) {
    bool any = false;
    for (std::size_t l = 0; l < n_labels; ++l) {
      if (d.gold->at(idx, l)) {
        ++support[l];
        any = true;
      }
    }
    (any ? labeled : unlabeled).push_back(idx);
  }

  // Fractional remaining demand per (label, subset) and remaining capacity
  // per subset, both decremented as examples are placed.
  std::vector<std::vector<double>> demand(n_labels, std::vector<double>(k));
  std::vector<double> capacity(k);
  for (std::size_t j = 0; j < k; ++j) {
    capacity[j] = spec.ratios[j] * static_cast<double>(members.size());
    for (std::size_t l = 0; l < n_labels; ++l) {
      demand[l][j] = spec.ratios[j] * static_cast<double>(support[l]);
    }
  }

  std::vector<std::size_t> remaining = support;
  std::vector<bool> placed(d.posts.size(), false);

  auto pick_subset = [&](const std::vector<double>& score) {
    double best = -1.0;
    for (std::size_t j = 0; j < k; ++j) {
      best = std::max(best, score[j]);
    }
    std::vector<std::size_t> tied;
    for (std::size_t j = 0; j < k; ++j) {
      if (score[j] == best) {
        tied.push_back(j);
      }
    }
    if (tied.size() == 1) {
      return tied.front();
    }
    double best_cap = -1.0;
    for (std::size_t j : tied) {
      best_cap = std::max(best_cap, capacity[j]);
    }
    std::vector<std::size_t> tied2;
    for (std::size_t j : tied) {
      if (capacity[j] == best_cap) {
        tied2.push_back(j);
      }
    }
    if (tied2.size() == 1) {
      return tied2.front();
    }
    return tied2[bounded(rng, tied2.size())];
  };

  auto place = [&](std::size_t idx, std::size_t subset) {
    assignment[idx] = static_cast<std::uint32_t>(subset);
    placed[idx] = true;
    capacity[subset] -= 1.0;
    for (std::size_t l = 0; l < n_labels; ++l) {
      if (d.gold->at(idx, l)) {
        demand[l][subset] -= 1.0;
        --remaining[l];
      }
    }
  };

  for (;;) {
    // rarest label with examples still unplaced; ties to the lower index
    std::size_t target = n_labels;
    for (std::size_t l = 0; l < n_labels; ++l) {
      if (remaining[l] > 0 && (target == n_labels || remaining[l] < remaining[target])) {
        target = l;
      }
    }
    if (target == n_labels) {
      break;
    }
    for (std::size_t idx : labeled) {
      if (!placed[idx] && d.gold->at(idx, target)) {
        place(idx, pick_subset(demand[target]));
      }
    }
  }

  for (std::size_t idx : unlabeled) {
    std::size_t subset = pick_subset(capacity);
    assignment[idx] = static_cast<std::uint32_t>(subset);
    capacity[subset] -= 1.0;
  }
}

}  // namespace

void SplitSpec::validate() const {
  if (ratios.size() < 2) {
    throw Error(errc::bad_config, "need at least two split ratios");
  }
  double sum = 0.0;
  for (double r : ratios) {
    if (!(r > 0.0 && r < 1.0)) {
      throw Error(errc::bad_config, "every ratio must lie in (0,1)");
    }
    sum += r;
  }
  if (std::abs(sum - 1.0) > 1e-9) {
    throw Error(errc::bad_config, "ratios must sum to 1");
  }
}

std::size_t SplitResult::subset_of(const std::string& id) const {
  if (index_.empty()) {
    index_.reserve(ids.size());
    for (std::size_t i = 0; i < ids.size(); ++i) {
      index_.emplace(ids[i], assignment[i]);
    }
  }
  auto it = index_.find(id);
  if (it == index_.end()) {
    throw Error(errc::unknown_id, id);
  }
  return it->second;
}

static SplitResult finalize_split(const Dataset& d, const SplitSpec& spec,
                                  std::vector<std::uint32_t> assignment,
                                  std::vector<std::string> warnings) {
  SplitResult result;
  result.n_subsets = spec.ratios.size();
  result.assignment = std::move(assignment);
  result.warnings = std::move(warnings);
  result.ids.reserve(d.posts.size());
  for (const auto& p : d.posts) {
    result.ids.push_back(p.id);
  }

  const std::size_t n_labels = d.gold->cols();
  result.subset_sizes.assign(result.n_subsets, 0);
  std::vector<std::vector<std::size_t>> positives(result.n_subsets,
                                                  std::vector<std::size_t>(n_labels, 0));
  for (std::size_t i = 0; i < result.ids.size(); ++i) {
    const std::size_t j = result.assignment[i];
    result.subset_sizes[j] += 1;
    for (std::size_t l = 0; l < n_labels; ++l) {
      positives[j][l] += d.gold->at(i, l);
    }
  }
  result.positive_proportion.assign(result.n_subsets, std::vector<double>(n_labels, 0.0));
  for (std::size_t j = 0; j < result.n_subsets; ++j) {
    if (result.subset_sizes[j] == 0) {
      continue;
    }
    for (std::size_t l = 0; l < n_labels; ++l) {
      result.positive_proportion[j][l] =
          static_cast<double>(positives[j][l]) / static_cast<double>(result.subset_sizes[j]);
    }
  }
  return result;
}

template <typename AssignFn>
static SplitResult run_split(const Dataset& d, const SplitSpec& spec, AssignFn assign) {
  spec.validate();
  require_gold(d);

  std::vector<std::uint32_t> assignment(d.posts.size(), 0);
  std::vector<std::string> warnings;

  if (spec.per_language) {
    std::map<Lang, std::vector<std::size_t>> buckets;
    for (std::size_t i = 0; i < d.posts.size(); ++i) {
      buckets[d.posts[i].lang].push_back(i);
    }
    for (const auto& [lang, members] : buckets) {
      Rng rng(splitmix64(spec.seed + static_cast<std::uint64_t>(lang) + 1));
      assign(members, rng, assignment, warnings);
    }
  } else {
    std::vector<std::size_t> members(d.posts.size());
    std::iota(members.begin(), members.end(), 0);
    Rng rng(spec.seed);
    assign(members, rng, assignment, warnings);
  }
  return finalize_split(d, spec, std::move(assignment), std::move(warnings));
}

SplitResult stratified_split_binary(const Dataset& d, const SplitSpec& spec) {
  if (d.subtask != Subtask::detect) {
    throw Error(errc::subtask_mismatch, "binary stratification needs the detect subtask");
  }
  return run_split(d, spec,
                   [&](const std::vector<std::size_t>& members, Rng& rng,
                       std::vector<std::uint32_t>& assignment, std::vector<std::string>& warnings) {
                     binary_assign(d, members, spec, rng, assignment, warnings);
                   });
}

SplitResult iterative_stratified_split(const Dataset& d, const SplitSpec& spec) {
  if (d.subtask == Subtask::detect) {
    throw Error(errc::subtask_mismatch,
                "iterative stratification targets the multi-label subtasks");
  }
  return run_split(d, spec,
                   [&](const std::vector<std::size_t>& members, Rng& rng,
                       std::vector<std::uint32_t>& assignment, std::vector<std::string>&) {
                     iterative_assign(d, members, spec, rng, assignment);
                   });
}

SplitResult split_dataset(const Dataset& d, const SplitSpec& spec) {
  return d.subtask == Subtask::detect ? stratified_split_binary(d, spec)
                                      : iterative_stratified_split(d, spec);
}

std::vector<Dataset> materialize_split(const Dataset& d, const SplitResult& result) {
  if (result.ids.size() != d.posts.size()) {
    throw Error(errc::shape_mismatch, "split result does not match dataset size");
  }
  std::vector<Dataset> out(result.n_subsets);
  std::vector<std::vector<std::string>> ids(result.n_subsets);
  std::vector<std::vector<std::uint8_t>> values(result.n_subsets);
  for (std::size_t j = 0; j < result.n_subsets; ++j) {
    out[j].subtask = d.subtask;
    out[j].partition = d.partition;
  }
  const std::size_t n_labels = d.gold ? d.gold->cols() : 0;
  for (std::size_t i = 0; i < d.posts.size(); ++i) {
    const std::size_t j = result.assignment[i];
    out[j].posts.push_back(d.posts[i]);
    if (d.gold) {
      ids[j].push_back(d.posts[i].id);
      for (std::size_t l = 0; l < n_labels; ++l) {
        values[j].push_back(d.gold->at(i, l));
      }
    }
  }
  if (d.gold) {
    for (std::size_t j = 0; j < result.n_subsets; ++j) {
      out[j].gold = LabelMatrix(d.subtask, std::move(ids[j]), std::move(values[j]));
    }
  }
  return out;
}

}  // namespace polar
