#include "svrp/classic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace svrp {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double route_load(const std::vector<int>& route, const EstimateVector& est) {
    double load = 0.0;
    for (int c : route) load += est.demand[static_cast<std::size_t>(c - 1)];
    return load;
}

// A route is admissible when its expected load fits, or when it is a lone
// customer nothing else could carry.
bool route_fits(const std::vector<int>& route, const EstimateVector& est, double capacity) {
    return route.size() <= 1 || route_load(route, est) <= capacity + 1e-12;
}

bool plan_fits(const Plan& plan, const EstimateVector& est, double capacity) {
    return std::all_of(plan.routes.begin(), plan.routes.end(),
                       [&](const auto& r) { return route_fits(r, est, capacity); });
}

// Canonical emission orientation: finish each route at its cheaper-return
// endpoint. Expected cost is direction-blind while a route fits Q, but
// realized refills cluster near the route end, so ending close to the depot
// keeps the 2*c_0i surcharges small. Uses estimated costs only.
Plan oriented(Plan plan, const EstimateVector& est) {
    for (auto& route : plan.routes) {
        if (route.size() < 2) continue;
        if (est.cost(0, route.front()) < est.cost(0, route.back()))
            std::reverse(route.begin(), route.end());
    }
    return plan;
}

// Random permutation split greedily at the expected capacity.
Plan random_plan(const InstanceSpec& inst, const EstimateVector& est, Rng& rng) {
    std::vector<int> perm(static_cast<std::size_t>(inst.n_customers));
    std::iota(perm.begin(), perm.end(), 1);
    for (int i = inst.n_customers - 1; i > 0; --i)
        std::swap(perm[static_cast<std::size_t>(i)], perm[static_cast<std::size_t>(rng.uniform_int(i + 1))]);

    Plan plan;
    std::vector<int> route;
    double load = 0.0;
    for (int c : perm) {
        const double d = est.demand[static_cast<std::size_t>(c - 1)];
        if (!route.empty() && load + d > inst.capacity + 1e-12) {
            plan.routes.push_back(route);
            route.clear();
            load = 0.0;
        }
        route.push_back(c);
        load += d;
    }
    if (!route.empty()) plan.routes.push_back(route);
    return plan;
}

// Descent toward a 2-opt + reallocate fixpoint on estimated travel; max_rounds
// caps the alternating sweeps (a single round already captures most of the
// gain). Routes stay within expected capacity throughout, so the surrogate
// pays no refills and arc deltas are exact surrogate deltas.
void local_refine(Plan& plan, const InstanceSpec& inst, const EstimateVector& est,
                  int max_rounds = 1 << 20) {
    const auto& c = est.cost;
    std::vector<double> loads(plan.routes.size());
    for (std::size_t r = 0; r < plan.routes.size(); ++r) loads[r] = route_load(plan.routes[r], est);

    bool improved = true;
    for (int round = 0; improved && round < max_rounds; ++round) {
        improved = false;

        for (auto& route : plan.routes) {
            const int len = static_cast<int>(route.size());
            for (int i = 0; i < len - 1; ++i)
                for (int j = i + 1; j < len; ++j) {
                    const int a = i > 0 ? route[static_cast<std::size_t>(i - 1)] : 0;
                    const int b = route[static_cast<std::size_t>(i)];
                    const int d = route[static_cast<std::size_t>(j)];
                    const int e = j + 1 < len ? route[static_cast<std::size_t>(j + 1)] : 0;
                    if (c(a, d) + c(b, e) < c(a, b) + c(d, e) - 1e-12) {
                        std::reverse(route.begin() + i, route.begin() + j + 1);
                        improved = true;
                    }
                }
        }

        for (std::size_t r = 0; r < plan.routes.size(); ++r) {
            auto& src = plan.routes[r];
            for (std::size_t pos = 0; pos < src.size(); ++pos) {
                const int cust = src[pos];
                const double d = est.demand[static_cast<std::size_t>(cust - 1)];
                const int prev = pos > 0 ? src[pos - 1] : 0;
                const int next = pos + 1 < src.size() ? src[pos + 1] : 0;
                const double gain = c(prev, cust) + c(cust, next) - c(prev, next);

                double best_delta = -1e-12;
                std::size_t best_r = r, best_slot = 0;
                for (std::size_t r2 = 0; r2 < plan.routes.size(); ++r2) {
                    const auto& dst = plan.routes[r2];
                    if (r2 != r && loads[r2] + d > inst.capacity + 1e-12) continue;
                    for (std::size_t slot = 0; slot <= dst.size(); ++slot) {
                        if (r2 == r && (slot == pos || slot == pos + 1)) continue;
                        const int a = slot > 0 ? dst[slot - 1] : 0;
                        const int b = slot < dst.size() ? dst[slot] : 0;
                        if (r2 == r && (a == cust || b == cust)) continue;
                        const double delta = c(a, cust) + c(cust, b) - c(a, b) - gain;
                        if (delta < best_delta) {
                            best_delta = delta;
                            best_r = r2;
                            best_slot = slot;
                        }
                    }
                }
                if (best_delta < -1e-12) {
                    src.erase(src.begin() + static_cast<std::ptrdiff_t>(pos));
                    auto& dst = plan.routes[best_r];
                    std::size_t slot = best_slot;
                    if (best_r == r && slot > pos) --slot;
                    dst.insert(dst.begin() + static_cast<std::ptrdiff_t>(slot), cust);
                    loads[r] -= d;
                    loads[best_r] += d;
                    improved = true;
                    --pos;
                }
            }
        }
    }
    std::erase_if(plan.routes, [](const auto& r) { return r.empty(); });
}

}  // namespace

ScenarioRecord as_record(const EstimateVector& estimates) {
    return as_record(estimates, {0.0, 0.0, 0.0});
}

ScenarioRecord as_record(const EstimateVector& estimates, const WeatherSample& w) {
    ScenarioRecord rec;
    rec.w = w;
    rec.demands = estimates.demand;
    rec.costs = estimates.cost;
    return rec;
}

double plan_expected_cost(const Plan& plan, const InstanceSpec& instance,
                          const EstimateVector& estimates) {
    return evaluate_a_priori(plan, instance, as_record(estimates));
}

double savings(int i, int j, const EstimateVector& estimates) {
    return estimates.cost(0, i) + estimates.cost(j, 0) - estimates.cost(i, j);
}

std::vector<SavingsEntry> savings_list(const InstanceSpec& instance,
                                       const EstimateVector& estimates) {
    std::vector<SavingsEntry> list;
    for (int i = 1; i <= instance.n_customers; ++i)
        for (int j = i + 1; j <= instance.n_customers; ++j)
            list.push_back({i, j, savings(i, j, estimates)});
    std::sort(list.begin(), list.end(), [](const SavingsEntry& a, const SavingsEntry& b) {
        if (a.value != b.value) return a.value > b.value;
        if (a.i != b.i) return a.i < b.i;
        return a.j < b.j;
    });
    return list;
}

Plan clarke_wright(const InstanceSpec& instance, const EstimateVector& estimates) {
    const int n = instance.n_customers;
    std::vector<std::vector<int>> routes(static_cast<std::size_t>(n));
    std::vector<int> route_of(static_cast<std::size_t>(n + 1));
    std::vector<double> loads(static_cast<std::size_t>(n));
    for (int c = 1; c <= n; ++c) {
        routes[static_cast<std::size_t>(c - 1)] = {c};
        route_of[static_cast<std::size_t>(c)] = c - 1;
        loads[static_cast<std::size_t>(c - 1)] = estimates.demand[static_cast<std::size_t>(c - 1)];
    }

    const auto list = savings_list(instance, estimates);
    auto exterior = [&](int c) {
        const auto& r = routes[static_cast<std::size_t>(route_of[static_cast<std::size_t>(c)])];
        return r.front() == c || r.back() == c;
    };

    // Repeatedly take the best feasible merge; merges never unlock new ones,
    // so one restartable scan over the sorted list is the literal best-first loop.
    bool merged = true;
    while (merged) {
        merged = false;
        for (const SavingsEntry& e : list) {
            if (e.value <= 0.0) break;
            const int ri = route_of[static_cast<std::size_t>(e.i)];
            const int rj = route_of[static_cast<std::size_t>(e.j)];
            if (ri == rj || !exterior(e.i) || !exterior(e.j)) continue;
            if (loads[static_cast<std::size_t>(ri)] + loads[static_cast<std::size_t>(rj)] >
                instance.capacity + 1e-12)
                continue;

            auto& a = routes[static_cast<std::size_t>(ri)];
            auto& b = routes[static_cast<std::size_t>(rj)];
            if (a.back() != e.i) std::reverse(a.begin(), a.end());
            if (b.front() != e.j) std::reverse(b.begin(), b.end());
            a.insert(a.end(), b.begin(), b.end());
            loads[static_cast<std::size_t>(ri)] += loads[static_cast<std::size_t>(rj)];
            for (int c : b) route_of[static_cast<std::size_t>(c)] = ri;
            b.clear();
            merged = true;
            break;
        }
    }

    Plan plan;
    for (auto& r : routes)
        if (!r.empty()) plan.routes.push_back(std::move(r));
    return oriented(std::move(plan), estimates);
}

namespace {

struct Move {
    Plan plan;
    std::vector<int> touched;  // customers whose position changed
};

// The paper's own neighborhood: relocate a customer to its best slot inside
// its current route.
bool move_specific(const InstanceSpec& inst, const EstimateVector& est, const Plan& base,
                   Rng& rng, Move& out) {
    std::vector<std::size_t> big;
    for (std::size_t r = 0; r < base.routes.size(); ++r)
        if (base.routes[r].size() >= 2) big.push_back(r);
    if (big.empty()) return false;
    const std::size_t r = big[static_cast<std::size_t>(rng.uniform_int(static_cast<int>(big.size())))];
    const auto& route = base.routes[r];
    const int pos = rng.uniform_int(static_cast<int>(route.size()));
    const int customer = route[static_cast<std::size_t>(pos)];

    double best = kInf;
    Plan best_plan;
    for (std::size_t slot = 0; slot < route.size(); ++slot) {
        Plan cand = base;
        auto& cr = cand.routes[r];
        cr.erase(cr.begin() + pos);
        cr.insert(cr.begin() + static_cast<std::ptrdiff_t>(slot), customer);
        const double c = plan_expected_cost(cand, inst, est);
        if (c < best) {
            best = c;
            best_plan = std::move(cand);
        }
    }
    out.plan = std::move(best_plan);
    out.touched = {customer};
    return true;
}

bool move_two_opt(const InstanceSpec& inst, const EstimateVector& est, const Plan& base,
                  Rng& rng, Move& out) {
    (void)inst;
    (void)est;
    std::vector<std::size_t> big;
    for (std::size_t r = 0; r < base.routes.size(); ++r)
        if (base.routes[r].size() >= 3) big.push_back(r);
    if (big.empty()) return false;
    const std::size_t r = big[static_cast<std::size_t>(rng.uniform_int(static_cast<int>(big.size())))];
    const int len = static_cast<int>(base.routes[r].size());
    int a = rng.uniform_int(len);
    int b = rng.uniform_int(len);
    if (a == b) return false;
    if (a > b) std::swap(a, b);
    out.plan = base;
    auto& route = out.plan.routes[r];
    std::reverse(route.begin() + a, route.begin() + b + 1);
    // Only the boundary customers whose depot-side arcs changed are marked;
    // freezing the whole segment starves later iterations of moves.
    out.touched = {route[static_cast<std::size_t>(a)], route[static_cast<std::size_t>(b)]};
    return true;
}

bool move_swap(const InstanceSpec& inst, const EstimateVector& est, const Plan& base, Rng& rng,
               Move& out) {
    std::vector<std::pair<std::size_t, std::size_t>> slots;
    for (std::size_t r = 0; r < base.routes.size(); ++r)
        for (std::size_t p = 0; p < base.routes[r].size(); ++p) slots.emplace_back(r, p);
    if (slots.size() < 2) return false;
    const auto s1 = slots[static_cast<std::size_t>(rng.uniform_int(static_cast<int>(slots.size())))];
    const auto s2 = slots[static_cast<std::size_t>(rng.uniform_int(static_cast<int>(slots.size())))];
    if (s1 == s2) return false;
    out.plan = base;
    int& c1 = out.plan.routes[s1.first][s1.second];
    int& c2 = out.plan.routes[s2.first][s2.second];
    std::swap(c1, c2);
    if (!plan_fits(out.plan, est, inst.capacity)) return false;
    out.touched = {c1, c2};
    return true;
}

// Moves a random customer to its best insertion slot in any other route or
// into a fresh singleton route, so the search can change the route count in
// both directions.
bool move_reallocate(const InstanceSpec& inst, const EstimateVector& est, const Plan& base,
                     Rng& rng, Move& out) {
    if (base.routes.empty()) return false;
    const auto from = static_cast<std::size_t>(rng.uniform_int(static_cast<int>(base.routes.size())));
    if (base.routes[from].empty()) return false;
    const int pos = rng.uniform_int(static_cast<int>(base.routes[from].size()));
    const int customer = base.routes[from][static_cast<std::size_t>(pos)];

    Plan stripped = base;
    auto& src = stripped.routes[from];
    src.erase(src.begin() + pos);
    const bool src_empty = src.empty();
    if (src_empty) stripped.routes.erase(stripped.routes.begin() + static_cast<std::ptrdiff_t>(from));

    double best = kInf;
    Plan best_plan;
    const std::size_t n_routes = stripped.routes.size();
    for (std::size_t to = 0; to <= n_routes; ++to) {
        const bool fresh = to == n_routes;
        if (fresh && src_empty) continue;  // singleton back to singleton is a no-op
        const std::size_t slots = fresh ? 1 : stripped.routes[to].size() + 1;
        for (std::size_t slot = 0; slot < slots; ++slot) {
            if (!src_empty && to == from && slot == static_cast<std::size_t>(pos))
                continue;  // reproducing the base plan is not a move
            Plan cand = stripped;
            if (fresh) cand.routes.emplace_back();
            auto& dst = cand.routes[to];
            dst.insert(dst.begin() + static_cast<std::ptrdiff_t>(slot), customer);
            if (!route_fits(dst, est, inst.capacity)) continue;
            const double c = plan_expected_cost(cand, inst, est);
            if (c < best) {
                best = c;
                best_plan = std::move(cand);
            }
        }
    }
    if (best == kInf) return false;
    out.plan = std::move(best_plan);
    out.touched = {customer};
    return true;
}

}  // namespace

Plan tabu_search(const InstanceSpec& instance, const EstimateVector& estimates,
                 const TabuParams& params, Rng& rng) {
    if (params.k_max < 0 || params.candidates < 1 || params.restart_after < 0 || params.kick < 1)
        throw std::invalid_argument("tabu_search: bad parameters");
    const int tenure = params.tenure > 0
                           ? params.tenure
                           : static_cast<int>(std::ceil(std::sqrt(instance.n_customers)));

    Plan current = random_plan(instance, estimates, rng);
    Plan best = current;
    double best_cost = plan_expected_cost(best, instance, estimates);

    std::vector<int> tabu_until(static_cast<std::size_t>(instance.n_customers + 1), -1);
    int since_improved = 0;

    for (int k = 0; k < params.k_max; ++k) {
        // The best-insertion moves pull the walk straight back into the last
        // basin; after a stagnant stretch, kick a few customers out of the
        // incumbent and resume from there.
        if (params.restart_after > 0 && since_improved >= params.restart_after) {
            current = best;
            for (int kicks = 0; kicks < params.kick; ++kicks) {
                const int cust = 1 + rng.uniform_int(instance.n_customers);
                const double d = estimates.demand[static_cast<std::size_t>(cust - 1)];
                for (auto& route : current.routes) std::erase(route, cust);
                std::erase_if(current.routes, [](const auto& r) { return r.empty(); });
                const int n_routes = static_cast<int>(current.routes.size());
                const int r = rng.uniform_int(n_routes + 1);
                if (r == n_routes ||
                    route_load(current.routes[static_cast<std::size_t>(r)], estimates) + d >
                        instance.capacity + 1e-12) {
                    current.routes.push_back({cust});
                } else {
                    auto& dst = current.routes[static_cast<std::size_t>(r)];
                    dst.insert(dst.begin() + rng.uniform_int(static_cast<int>(dst.size()) + 1), cust);
                }
            }
            std::fill(tabu_until.begin(), tabu_until.end(), -1);
            since_improved = 0;
        }
        Move best_move;
        double best_move_cost = kInf;
        bool found = false;
        for (int c = 0; c < params.candidates; ++c) {
            Move mv;
            bool ok = false;
            switch (rng.uniform_int(4)) {
                case 0: ok = move_specific(instance, estimates, current, rng, mv); break;
                case 1: ok = move_two_opt(instance, estimates, current, rng, mv); break;
                case 2: ok = move_swap(instance, estimates, current, rng, mv); break;
                default: ok = move_reallocate(instance, estimates, current, rng, mv); break;
            }
            if (!ok) continue;
            const double cost = plan_expected_cost(mv.plan, instance, estimates);
            const bool tabu = std::any_of(mv.touched.begin(), mv.touched.end(), [&](int cu) {
                return tabu_until[static_cast<std::size_t>(cu)] > k;
            });
            if (tabu && cost >= best_cost) continue;  // aspiration: beat the incumbent
            if (cost < best_move_cost) {
                best_move_cost = cost;
                best_move = std::move(mv);
                found = true;
            }
        }
        if (!found) {
            ++since_improved;
            continue;
        }
        current = std::move(best_move.plan);
        for (int cu : best_move.touched) tabu_until[static_cast<std::size_t>(cu)] = k + tenure;
        if (best_move_cost < best_cost) {
            best_cost = best_move_cost;
            best = current;
            since_improved = 0;
        } else {
            ++since_improved;
        }
    }
    // A fixed iteration budget can end mid-descent on larger instances; finish
    // the descent before emitting.
    local_refine(best, instance, estimates);
    return oriented(std::move(best), estimates);
}

Plan aco(const InstanceSpec& instance, const EstimateVector& estimates, const AcoParams& params,
         Rng& rng) {
    if (params.n_ants < 1 || params.iterations < 0 || params.evaporation <= 0.0 ||
        params.evaporation >= 1.0 || params.pheromone_importance < 0.0 ||
        params.heuristic_importance < 0.0)
        throw std::invalid_argument("aco: bad parameters");

    const int n = instance.n_customers;
    const int nodes = n + 1;
    Mat tau(nodes, nodes, 1.0);
    Mat eta_log(nodes, nodes);
    for (int i = 0; i < nodes; ++i)
        for (int j = 0; j < nodes; ++j)
            eta_log(i, j) = -params.heuristic_importance *
                            std::log(std::max(estimates.cost(i, j), 1e-9));

    Plan best;
    double best_cost = kInf;
    std::vector<double> weight(static_cast<std::size_t>(nodes));
    std::vector<int> cand(static_cast<std::size_t>(nodes));
    Mat tau_log(nodes, nodes);

    for (int it = 0; it <= params.iterations; ++it) {
        for (int i = 0; i < nodes; ++i)
            for (int j = 0; j < nodes; ++j) tau_log(i, j) = std::log(tau(i, j));

        std::vector<std::pair<Plan, double>> tours;
        for (int ant = 0; ant < params.n_ants; ++ant) {
            Plan plan;
            std::vector<char> visited(static_cast<std::size_t>(n + 1), 0);
            int remaining = n;
            int pos = 0;
            double load = instance.capacity;
            std::vector<int> route;
            while (remaining > 0) {
                int n_cand = 0;
                for (int c = 1; c <= n; ++c) {
                    if (visited[static_cast<std::size_t>(c)]) continue;
                    const double d = estimates.demand[static_cast<std::size_t>(c - 1)];
                    if (d <= load + 1e-12 || (pos == 0 && route.empty()))
                        cand[static_cast<std::size_t>(n_cand++)] = c;
                }
                // Mid-tour the depot competes like any node, so ants can bank
                // slack by closing a route before it is full.
                if (!route.empty()) cand[static_cast<std::size_t>(n_cand++)] = 0;
                if (n_cand == 0) {  // nothing fits: refill
                    plan.routes.push_back(route);
                    route.clear();
                    pos = 0;
                    load = instance.capacity;
                    continue;
                }
                double max_e = -kInf;
                for (int c = 0; c < n_cand; ++c) {
                    const int node = cand[static_cast<std::size_t>(c)];
                    const double e = params.pheromone_importance * tau_log(pos, node) +
                                     eta_log(pos, node);
                    weight[static_cast<std::size_t>(c)] = e;
                    max_e = std::max(max_e, e);
                }
                double total = 0.0;
                for (int c = 0; c < n_cand; ++c) {
                    weight[static_cast<std::size_t>(c)] =
                        std::exp(weight[static_cast<std::size_t>(c)] - max_e);
                    total += weight[static_cast<std::size_t>(c)];
                }
                double pick = rng.uniform() * total;
                int chosen = cand[static_cast<std::size_t>(n_cand - 1)];
                for (int c = 0; c < n_cand; ++c) {
                    pick -= weight[static_cast<std::size_t>(c)];
                    if (pick <= 0.0) {
                        chosen = cand[static_cast<std::size_t>(c)];
                        break;
                    }
                }
                if (chosen == 0) {
                    plan.routes.push_back(route);
                    route.clear();
                    pos = 0;
                    load = instance.capacity;
                    continue;
                }
                visited[static_cast<std::size_t>(chosen)] = 1;
                load -= estimates.demand[static_cast<std::size_t>(chosen - 1)];
                route.push_back(chosen);
                pos = chosen;
                --remaining;
            }
            if (!route.empty()) plan.routes.push_back(route);
            std::erase_if(plan.routes, [](const auto& r) { return r.empty(); });

            // One cheap sweep per ant keeps tour quality from collapsing under
            // a sharp pheromone power; the iteration champion descends fully.
            local_refine(plan, instance, estimates, 1);
            const double cost = plan_expected_cost(plan, instance, estimates);
            tours.emplace_back(std::move(plan), cost);
        }

        auto champ = std::min_element(tours.begin(), tours.end(),
                                      [](const auto& a, const auto& b) { return a.second < b.second; });
        local_refine(champ->first, instance, estimates);
        champ->second = plan_expected_cost(champ->first, instance, estimates);
        if (champ->second < best_cost) {
            best_cost = champ->second;
            best = champ->first;
        }

        if (it == params.iterations) break;
        for (double& t : tau.a) t *= 1.0 - params.evaporation;
        for (const auto& [plan, cost] : tours) {
            const double delta = 1.0 / std::max(cost, 1e-9);
            for (const auto& route : plan.routes) {
                int prev = 0;
                for (int c : route) {
                    tau(prev, c) += delta;
                    tau(c, prev) += delta;
                    prev = c;
                }
                tau(prev, 0) += delta;
                tau(0, prev) += delta;
            }
        }
    }
    return oriented(std::move(best), estimates);
}

Plan brute_force(const InstanceSpec& instance, const EstimateVector& estimates) {
    const int n = instance.n_customers;
    if (n > 10) throw std::invalid_argument("brute_force: instance too large");

    std::vector<int> perm(static_cast<std::size_t>(n));
    std::iota(perm.begin(), perm.end(), 1);

    const auto& cost = estimates.cost;
    Plan best;
    double best_cost = kInf;
    do {
        // Optimal contiguous split: segment(i, j) = customers perm[i..j) as one
        // route; admissible when it fits or is a singleton.
        std::vector<double> dp(static_cast<std::size_t>(n + 1), kInf);
        std::vector<int> cut(static_cast<std::size_t>(n + 1), 0);
        dp[0] = 0.0;
        for (int j = 1; j <= n; ++j)
            for (int i = j - 1; i >= 0; --i) {
                double load = 0.0, arc = 0.0;
                for (int k = i; k < j; ++k) {
                    load += estimates.demand[static_cast<std::size_t>(perm[static_cast<std::size_t>(k)] - 1)];
                    arc += k == i ? cost(0, perm[static_cast<std::size_t>(k)])
                                  : cost(perm[static_cast<std::size_t>(k - 1)], perm[static_cast<std::size_t>(k)]);
                }
                arc += cost(perm[static_cast<std::size_t>(j - 1)], 0);
                if (j - i > 1 && load > instance.capacity + 1e-12) continue;
                if (dp[static_cast<std::size_t>(i)] + arc < dp[static_cast<std::size_t>(j)]) {
                    dp[static_cast<std::size_t>(j)] = dp[static_cast<std::size_t>(i)] + arc;
                    cut[static_cast<std::size_t>(j)] = i;
                }
            }
        if (dp[static_cast<std::size_t>(n)] < best_cost) {
            best_cost = dp[static_cast<std::size_t>(n)];
            best.routes.clear();
            int j = n;
            while (j > 0) {
                const int i = cut[static_cast<std::size_t>(j)];
                best.routes.insert(best.routes.begin(),
                                   std::vector<int>(perm.begin() + i, perm.begin() + j));
                j = i;
            }
        }
    } while (std::next_permutation(perm.begin(), perm.end()));
    return oriented(std::move(best), estimates);
}

AcoParams hyperparameter_search(const std::vector<AcoParams>& grid, const InstanceSpec& instance,
                                const ScenarioSet& validation, const EstimateVector& estimates,
                                std::uint64_t seed) {
    if (grid.empty()) throw std::invalid_argument("hyperparameter_search: empty grid");
    std::size_t best_idx = 0;
    double best_mean = kInf;
    for (std::size_t g = 0; g < grid.size(); ++g) {
        double total = 0.0;
        for (std::size_t r = 0; r < validation.records.size(); ++r) {
            Rng rng(Rng::derive(seed, (g << 32) ^ r));
            const Plan plan = aco(instance, estimates, grid[g], rng);
            total += evaluate_a_priori(plan, instance, validation.records[r]);
        }
        const double mean = total / static_cast<double>(validation.records.size());
        if (mean < best_mean) {
            best_mean = mean;
            best_idx = g;
        }
    }
    return grid[best_idx];
}

}  // namespace svrp
