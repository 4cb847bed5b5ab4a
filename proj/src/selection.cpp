#include "evopref/selection.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace evopref {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

bool dominates(const ObjectiveVector& a, const ObjectiveVector& b) {
    if (a.size() != b.size())
        throw std::invalid_argument("objective vectors differ in length");
    bool strictly_better = false;
    for (std::size_t j = 0; j < a.size(); ++j) {
        if (a[j] < b[j])
            return false;
        if (a[j] > b[j])
            strictly_better = true;
    }
    return strictly_better;
}

std::vector<std::vector<int>> fast_nondominated_sort(
    const std::vector<ObjectiveVector>& objs) {
    const int n = static_cast<int>(objs.size());
    std::vector<std::vector<int>> fronts;
    if (n == 0)
        return fronts;

    std::vector<std::vector<int>> dominated_by(n);  // i -> set i dominates
    std::vector<int> domination_count(n, 0);
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
            if (dominates(objs[i], objs[j])) {
                dominated_by[i].push_back(j);
                ++domination_count[j];
            } else if (dominates(objs[j], objs[i])) {
                dominated_by[j].push_back(i);
                ++domination_count[i];
            }
        }
    }

    std::vector<int> current;
    for (int i = 0; i < n; ++i)
        if (domination_count[i] == 0)
            current.push_back(i);
    while (!current.empty()) {
        fronts.push_back(current);
        std::vector<int> next;
        for (int i : current)
            for (int j : dominated_by[i])
                if (--domination_count[j] == 0)
                    next.push_back(j);
        std::sort(next.begin(), next.end());  // keep input order within front
        current = std::move(next);
    }
    return fronts;
}

std::vector<double> crowding_distance(const std::vector<ObjectiveVector>& front) {
    const int n = static_cast<int>(front.size());
    if (n == 0)
        throw std::invalid_argument("crowding distance of an empty front");
    if (n <= 2)
        return std::vector<double>(n, kInf);

    const std::size_t m = front[0].size();
    std::vector<double> dist(n, 0.0);
    std::vector<int> order(n);
    for (std::size_t j = 0; j < m; ++j) {
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
            return front[a][j] < front[b][j];
        });
        const double lo = front[order.front()][j];
        const double hi = front[order.back()][j];
        if (hi == lo)
            continue;  // degenerate objective, contributes nothing
        dist[order.front()] = kInf;
        dist[order.back()] = kInf;
        const double inv_range = 1.0 / (hi - lo);
        for (int i = 1; i + 1 < n; ++i) {
            if (dist[order[i]] == kInf)
                continue;
            dist[order[i]] +=
                (front[order[i + 1]][j] - front[order[i - 1]][j]) * inv_range;
        }
    }
    return dist;
}

RankedPopulation RankedPopulation::rank_of(std::vector<ObjectiveVector> objs) {
    RankedPopulation pop;
    pop.objectives = std::move(objs);
    pop.fronts = fast_nondominated_sort(pop.objectives);
    pop.rank.assign(pop.objectives.size(), 0);
    pop.crowding.assign(pop.objectives.size(), 0.0);
    for (std::size_t f = 0; f < pop.fronts.size(); ++f) {
        std::vector<ObjectiveVector> members;
        members.reserve(pop.fronts[f].size());
        for (int idx : pop.fronts[f])
            members.push_back(pop.objectives[idx]);
        const std::vector<double> cd = crowding_distance(members);
        for (std::size_t i = 0; i < pop.fronts[f].size(); ++i) {
            pop.rank[pop.fronts[f][i]] = static_cast<int>(f);
            pop.crowding[pop.fronts[f][i]] = cd[i];
        }
    }
    return pop;
}

namespace {

// Winner between two contestants; remaining ties resolved by the stream.
int duel(const RankedPopulation& pop, int a, int b, Rng& rng) {
    if (pop.rank[a] != pop.rank[b])
        return pop.rank[a] < pop.rank[b] ? a : b;
    if (pop.crowding[a] != pop.crowding[b])
        return pop.crowding[a] > pop.crowding[b] ? a : b;
    return rng.uniform_int(0, 1) == 0 ? a : b;
}

}  // namespace

int tournament_select(const RankedPopulation& pop, int size, Rng& rng) {
    const int n = static_cast<int>(pop.objectives.size());
    if (n == 0)
        throw std::invalid_argument("tournament over an empty population");
    if (size < 1)
        throw std::invalid_argument("tournament size must be >= 1");
    int winner = static_cast<int>(rng.uniform_int(0, n - 1));
    for (int t = 1; t < size; ++t) {
        const int challenger = static_cast<int>(rng.uniform_int(0, n - 1));
        winner = duel(pop, winner, challenger, rng);
    }
    return winner;
}

int binary_tournament(const RankedPopulation& pop, Rng& rng) {
    return tournament_select(pop, 2, rng);
}

int binary_tournament(const RankedPopulation& pop, std::uint64_t seed) {
    Rng rng(derive_seed({stream::tournament, seed}));
    return tournament_select(pop, 2, rng);
}

namespace {

std::vector<int> select_with_ties(const std::vector<ObjectiveVector>& objs,
                                  int mu,
                                  const std::vector<double>* random_ties) {
    const int n = static_cast<int>(objs.size());
    if (mu <= 0)
        throw std::invalid_argument("mu must be positive");
    if (n < mu)
        throw std::invalid_argument("environmental selection needs >= mu inputs");

    const auto fronts = fast_nondominated_sort(objs);
    std::vector<int> chosen;
    chosen.reserve(mu);
    for (const auto& front : fronts) {
        if (static_cast<int>(chosen.size() + front.size()) <= mu) {
            chosen.insert(chosen.end(), front.begin(), front.end());
            if (static_cast<int>(chosen.size()) == mu)
                break;
            continue;
        }
        // Splitting front: order by descending tie value, input order on ties.
        std::vector<double> tie;
        if (random_ties) {
            tie.reserve(front.size());
            for (int idx : front)
                tie.push_back((*random_ties)[idx]);
        } else {
            std::vector<ObjectiveVector> members;
            members.reserve(front.size());
            for (int idx : front)
                members.push_back(objs[idx]);
            tie = crowding_distance(members);
        }
        std::vector<int> order(front.size());
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
            return tie[a] > tie[b];
        });
        const int need = mu - static_cast<int>(chosen.size());
        for (int i = 0; i < need; ++i)
            chosen.push_back(front[order[i]]);
        break;
    }
    std::sort(chosen.begin(), chosen.end());
    return chosen;
}

}  // namespace

std::vector<int> environmental_selection(const std::vector<ObjectiveVector>& objs,
                                         int mu) {
    return select_with_ties(objs, mu, nullptr);
}

std::vector<int> environmental_selection_random_ties(
    const std::vector<ObjectiveVector>& objs, int mu, Rng& rng) {
    std::vector<double> ties(objs.size());
    for (double& t : ties)
        t = rng.uniform01();
    return select_with_ties(objs, mu, &ties);
}

}  // namespace evopref
