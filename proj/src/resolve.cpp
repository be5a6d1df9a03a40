#include "schex/resolve.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <set>
#include <unordered_map>
#include <unordered_set>

namespace schex {

namespace {

std::int64_t pack(PixelCoord p) {
    return (static_cast<std::int64_t>(p.row) << 32) | static_cast<std::uint32_t>(p.col);
}

int manhattan_to_square(PixelCoord p, PixelCoord center, int half) {
    int cr = std::clamp(p.row, center.row - half, center.row + half);
    int cc = std::clamp(p.col, center.col - half, center.col + half);
    return std::abs(p.row - cr) + std::abs(p.col - cc);
}

bool in_square(PixelCoord p, PixelCoord center, int half) {
    return std::abs(p.row - center.row) <= half && std::abs(p.col - center.col) <= half;
}

// Virtual adjacency across a deleted intersection, remembering which
// intersection it stands for.
struct GlueEdge {
    PixelCoord a{}, b{};
    PixelCoord via{};
};

struct WorkingGroup {
    int region_id = 0;
    std::vector<PixelCoord> pixels;  // sorted
    std::vector<GlueEdge> glue;
    std::vector<Endpoint> endpoints;  // sorted by component id
};

// Connected components of a pixel set under 8-adjacency plus glue edges.
// Component order follows the smallest pixel of each component.
std::vector<std::vector<PixelCoord>> components_of(const std::vector<PixelCoord>& pixels,
                                                   const std::vector<GlueEdge>& glue) {
    std::unordered_map<std::int64_t, int> index;
    index.reserve(pixels.size() * 2);
    for (std::size_t i = 0; i < pixels.size(); ++i)
        index[pack(pixels[i])] = static_cast<int>(i);

    std::vector<std::vector<int>> extra(pixels.size());
    for (const auto& e : glue) {
        auto ia = index.find(pack(e.a));
        auto ib = index.find(pack(e.b));
        if (ia == index.end() || ib == index.end()) continue;  // severed
        extra[static_cast<std::size_t>(ia->second)].push_back(ib->second);
        extra[static_cast<std::size_t>(ib->second)].push_back(ia->second);
    }

    std::vector<std::vector<PixelCoord>> comps;
    std::vector<std::uint8_t> seen(pixels.size(), 0);
    std::vector<int> stack;
    for (std::size_t i = 0; i < pixels.size(); ++i) {
        if (seen[i]) continue;
        comps.emplace_back();
        auto& comp = comps.back();
        seen[i] = 1;
        stack.push_back(static_cast<int>(i));
        while (!stack.empty()) {
            int cur = stack.back();
            stack.pop_back();
            comp.push_back(pixels[static_cast<std::size_t>(cur)]);
            PixelCoord p = pixels[static_cast<std::size_t>(cur)];
            for (int dr = -1; dr <= 1; ++dr) {
                for (int dc = -1; dc <= 1; ++dc) {
                    if (dr == 0 && dc == 0) continue;
                    auto it = index.find(pack({p.row + dr, p.col + dc}));
                    if (it != index.end() && !seen[static_cast<std::size_t>(it->second)]) {
                        seen[static_cast<std::size_t>(it->second)] = 1;
                        stack.push_back(it->second);
                    }
                }
            }
            for (int nb : extra[static_cast<std::size_t>(cur)]) {
                if (!seen[static_cast<std::size_t>(nb)]) {
                    seen[static_cast<std::size_t>(nb)] = 1;
                    stack.push_back(nb);
                }
            }
        }
        std::sort(comp.begin(), comp.end());
    }
    std::sort(comps.begin(), comps.end(),
              [](const auto& a, const auto& b) { return a.front() < b.front(); });
    return comps;
}

PixelCoord locate_in_pixels(const std::vector<PixelCoord>& pixels, int kernel) {
    if (pixels.empty()) throw InvalidInput("locate_intersection: empty region");
    if (kernel < 1 || kernel % 2 == 0)
        throw InvalidInput("locate_intersection: kernel must be odd and >= 1");
    if (kernel == 1) return pixels.front();  // every window counts 1

    int rmin = pixels.front().row, rmax = pixels.front().row;
    int cmin = pixels.front().col, cmax = pixels.front().col;
    for (const auto& p : pixels) {
        rmin = std::min(rmin, p.row);
        rmax = std::max(rmax, p.row);
        cmin = std::min(cmin, p.col);
        cmax = std::max(cmax, p.col);
    }
    const int H = rmax - rmin + 1, W = cmax - cmin + 1;
    // Integral image of the region mask over its bounding box.
    std::vector<int> integral(static_cast<std::size_t>(H + 1) * (W + 1), 0);
    auto at = [&](int r, int c) -> int& {
        return integral[static_cast<std::size_t>(r) * (W + 1) + c];
    };
    for (const auto& p : pixels) at(p.row - rmin + 1, p.col - cmin + 1) = 1;
    for (int r = 1; r <= H; ++r)
        for (int c = 1; c <= W; ++c) at(r, c) += at(r - 1, c) + at(r, c - 1) - at(r - 1, c - 1);

    const int half = kernel / 2;
    auto window_count = [&](PixelCoord p) {
        int r0 = std::clamp(p.row - half - rmin, 0, H);
        int r1 = std::clamp(p.row + half - rmin + 1, 0, H);
        int c0 = std::clamp(p.col - half - cmin, 0, W);
        int c1 = std::clamp(p.col + half - cmin + 1, 0, W);
        return at(r1, c1) - at(r0, c1) - at(r1, c0) + at(r0, c0);
    };

    int best = -1;
    std::vector<PixelCoord> argmax;  // pixels sorted, so argmax stays sorted
    for (const auto& p : pixels) {
        int count = window_count(p);
        if (count > best) {
            best = count;
            argmax.clear();
        }
        if (count == best) argmax.push_back(p);
    }

    std::unordered_set<std::int64_t> in_argmax;
    for (const auto& p : argmax) in_argmax.insert(pack(p));

    // The plateau component holding the overall smallest pixel, then the
    // most plateau-central pixel within it.
    auto comps = components_of(argmax, {});
    const auto& comp = comps.front();
    int best_degree = -1;
    PixelCoord chosen = comp.front();
    for (const auto& p : comp) {
        int degree = 0;
        for (auto [dr, dc] : {std::pair{-1, 0}, {1, 0}, {0, -1}, {0, 1}})
            if (in_argmax.count(pack({p.row + dr, p.col + dc}))) ++degree;
        if (degree > best_degree) {
            best_degree = degree;
            chosen = p;  // comp is sorted: first max wins remaining ties
        }
    }
    return chosen;
}

std::vector<std::string> arm_components(const std::vector<PixelCoord>& arm,
                                        const std::vector<ComponentBox>& boxes) {
    int rmin = arm.front().row, rmax = arm.front().row;
    int cmin = arm.front().col, cmax = arm.front().col;
    for (const auto& p : arm) {
        rmin = std::min(rmin, p.row);
        rmax = std::max(rmax, p.row);
        cmin = std::min(cmin, p.col);
        cmax = std::max(cmax, p.col);
    }
    std::vector<std::string> ids;
    for (const auto& b : boxes) {
        if (b.x0 - 1 > cmax || b.x1 + 1 <= cmin || b.y0 - 1 > rmax || b.y1 + 1 <= rmin)
            continue;
        for (const auto& p : arm) {
            if (box_pixel_gap(b, p) == 1) {
                ids.push_back(b.id);
                break;
            }
        }
    }
    std::sort(ids.begin(), ids.end());
    return ids;
}

struct SplitArm {
    std::vector<PixelCoord> pixels;
    double angle = 0.0;
    std::vector<std::string> components;
    PixelCoord rep{};  // attachment point for the glue edge
};

struct SplitOutcome {
    std::vector<SplitArm> arms;  // sorted by angle
    std::string failure;
};

SplitOutcome split_at(const WorkingGroup& wg, PixelCoord center, int kernel,
                      const std::vector<ComponentBox>& boxes) {
    SplitOutcome out;
    const int half = kernel / 2;
    std::vector<PixelCoord> remaining;
    remaining.reserve(wg.pixels.size());
    for (const auto& p : wg.pixels)
        if (!in_square(p, center, half)) remaining.push_back(p);
    if (remaining.empty()) {
        out.failure = "block swallowed the whole region";
        return out;
    }

    auto comps = components_of(remaining, wg.glue);
    if (comps.size() < 4) {
        out.failure = "fewer than four arms";
        return out;
    }
    if (comps.size() % 2 != 0) {
        out.failure = "odd arm count";
        return out;
    }

    for (auto& comp : comps) {
        SplitArm arm;
        arm.pixels = std::move(comp);

        double sum_r = 0.0, sum_c = 0.0;
        int n = 0;
        for (const auto& p : arm.pixels) {
            if (manhattan_to_square(p, center, half) <= kContactWindowRadius) {
                sum_r += p.row + 0.5;
                sum_c += p.col + 0.5;
                ++n;
            }
        }
        if (n == 0) {
            out.failure = "arm detached from the block";
            return out;
        }
        arm.angle = angle_from_delta(sum_c / n - (center.col + 0.5),
                                     sum_r / n - (center.row + 0.5));

        arm.components = arm_components(arm.pixels, boxes);
        if (arm.components.empty()) {
            out.failure = "arm touches no component";
            return out;
        }

        bool rep_found = false;
        int best_dist = 0;
        for (const auto& p : arm.pixels) {
            int d = manhattan_to_square(p, center, half);
            if (!rep_found || d < best_dist) {
                rep_found = true;
                best_dist = d;
                arm.rep = p;
            }
        }
        out.arms.push_back(std::move(arm));
    }

    std::sort(out.arms.begin(), out.arms.end(), [](const SplitArm& a, const SplitArm& b) {
        if (a.angle != b.angle) return a.angle < b.angle;
        return a.pixels.front() < b.pixels.front();
    });

    // Opposite pairing is unreliable when two arms leave at nearly the
    // same angle.
    for (std::size_t i = 0; i < out.arms.size(); ++i) {
        std::size_t next = (i + 1) % out.arms.size();
        if (angle_distance_deg(out.arms[i].angle, out.arms[next].angle) < kArmAngleMinSepDeg) {
            out.failure = "arm angles too close to pair";
            out.arms.clear();
            return out;
        }
    }
    return out;
}

double junction_side_angle(const std::vector<PixelCoord>& pixels, PixelCoord center) {
    double sum_r = 0.0, sum_c = 0.0;
    int n = 0;
    for (const auto& p : pixels) {
        if (std::abs(p.row - center.row) + std::abs(p.col - center.col) <=
            kContactWindowRadius) {
            sum_r += p.row + 0.5;
            sum_c += p.col + 0.5;
            ++n;
        }
    }
    return angle_from_delta(sum_c / n - (center.col + 0.5), sum_r / n - (center.row + 0.5));
}

BinaryConnection make_connection(Endpoint a, Endpoint b, std::vector<PixelCoord> via,
                                 int region_id) {
    BinaryConnection conn;
    if (std::tie(b.component_id, b.contact) < std::tie(a.component_id, a.contact))
        std::swap(a, b);
    conn.a = std::move(a);
    conn.b = std::move(b);
    std::sort(via.begin(), via.end());
    via.erase(std::unique(via.begin(), via.end()), via.end());
    conn.via = std::move(via);
    conn.region_id = region_id;
    return conn;
}

}  // namespace

GroupCase classify_size(std::size_t touched_count) {
    if (touched_count == 0) throw InvalidInput("classify: empty group");
    if (touched_count == 1) return GroupCase::Dangling;
    if (touched_count == 2) return GroupCase::Direct;
    return touched_count % 2 == 0 ? GroupCase::Crossing : GroupCase::OddException;
}

GroupCase classify_group(const ConnectionGroup& g) { return classify_size(g.touched.size()); }

std::string group_case_name(GroupCase c) {
    switch (c) {
        case GroupCase::Dangling: return "Dangling";
        case GroupCase::Direct: return "Direct";
        case GroupCase::OddException: return "OddException";
        case GroupCase::Crossing: return "Crossing";
    }
    return "?";
}

PixelCoord locate_intersection(const ConnectionGroup& g, int kernel) {
    return locate_in_pixels(g.pixels, kernel);
}

DanglingResolution insert_dangling_junction(const ConnectionGroup& g,
                                            const ComponentBox& component,
                                            const std::string& junction_id) {
    if (g.touched.size() != 1)
        throw InvalidInput("insert_dangling_junction: group is not dangling");
    const Contact& contact = g.touched.front();

    // Geodesic BFS along region pixels from the contact pixel.
    std::unordered_map<std::int64_t, int> dist;
    dist.reserve(g.pixels.size() * 2);
    std::deque<PixelCoord> queue;
    dist[pack(contact.pixel)] = 0;
    queue.push_back(contact.pixel);
    std::unordered_set<std::int64_t> members;
    for (const auto& p : g.pixels) members.insert(pack(p));
    while (!queue.empty()) {
        PixelCoord p = queue.front();
        queue.pop_front();
        int d = dist[pack(p)];
        for (int dr = -1; dr <= 1; ++dr) {
            for (int dc = -1; dc <= 1; ++dc) {
                if (dr == 0 && dc == 0) continue;
                PixelCoord q{p.row + dr, p.col + dc};
                if (members.count(pack(q)) && !dist.count(pack(q))) {
                    dist[pack(q)] = d + 1;
                    queue.push_back(q);
                }
            }
        }
    }
    // Scan in sorted pixel order: ties on distance keep the smaller pixel.
    PixelCoord far = contact.pixel;
    int far_dist = -1;
    for (const auto& p : g.pixels) {
        auto it = dist.find(pack(p));
        int d = it == dist.end() ? -1 : it->second;
        if (d > far_dist) {
            far = p;
            far_dist = d;
        }
    }

    DanglingResolution out;
    out.junction.id = junction_id;
    out.junction.center = far;
    out.junction.box = ComponentBox{junction_id, ComponentCategory::Junction, Orientation::R0,
                                    far.col - 1, far.row - 1, far.col + 2, far.row + 2};

    Endpoint comp_end{contact.component_id, contact.pixel, contact_angle(g, component)};
    Endpoint junc_end{junction_id, far, junction_side_angle(g.pixels, far)};
    out.connection = make_connection(comp_end, junc_end, {}, g.region_id);
    return out;
}

CrossingSplit resolve_crossing(const ConnectionGroup& g, PixelCoord center, int kernel,
                               const std::vector<ComponentBox>& boxes) {
    WorkingGroup wg;
    wg.region_id = g.region_id;
    wg.pixels = g.pixels;
    auto outcome = split_at(wg, center, kernel, boxes);

    CrossingSplit out;
    out.failure = outcome.failure;
    for (auto& arm : outcome.arms)
        out.arms.push_back({std::move(arm.pixels), arm.angle, std::move(arm.components)});
    return out;
}

std::optional<std::vector<std::pair<std::size_t, std::size_t>>> reroute_opposites(
    const std::vector<double>& arm_angles) {
    const std::size_t n = arm_angles.size();
    if (n < 4 || n % 2 != 0) return std::nullopt;
    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (arm_angles[a] != arm_angles[b]) return arm_angles[a] < arm_angles[b];
        return a < b;
    });
    std::vector<std::pair<std::size_t, std::size_t>> pairs;
    const std::size_t m = n / 2;
    for (std::size_t i = 0; i < m; ++i) pairs.push_back({order[i], order[i + m]});
    return pairs;
}

ResolutionReport resolve_all(const std::vector<ConnectionGroup>& groups,
                             const std::vector<ComponentBox>& boxes, int kernel) {
    if (kernel < 1 || kernel % 2 == 0)
        throw InvalidInput("resolve_all: kernel must be odd and >= 1");

    std::map<std::string, const ComponentBox*> box_by_id;
    std::set<std::string> used_ids;
    for (const auto& b : boxes) {
        box_by_id[b.id] = &b;
        used_ids.insert(b.id);
    }

    ResolutionReport report;
    std::deque<WorkingGroup> queue;
    for (const auto& g : groups) {
        WorkingGroup wg;
        wg.region_id = g.region_id;
        wg.pixels = g.pixels;
        for (const auto& t : g.touched) {
            auto it = box_by_id.find(t.component_id);
            if (it == box_by_id.end())
                throw InvalidInput("resolve_all: unknown component \"" + t.component_id + "\"");
            wg.endpoints.push_back({t.component_id, t.pixel, contact_angle(g, *it->second)});
        }
        queue.push_back(std::move(wg));
    }

    int junction_counter = 0;
    auto fresh_junction_id = [&] {
        std::string id;
        do {
            id = "xj" + std::to_string(++junction_counter);
        } while (used_ids.count(id));
        used_ids.insert(id);
        return id;
    };

    while (!queue.empty()) {
        WorkingGroup wg = std::move(queue.front());
        queue.pop_front();

        std::vector<PixelCoord> vias;
        for (const auto& e : wg.glue) vias.push_back(e.via);

        switch (classify_size(wg.endpoints.size())) {
            case GroupCase::Dangling: {
                ConnectionGroup g{wg.region_id, wg.pixels,
                                  {{wg.endpoints[0].component_id, wg.endpoints[0].contact}}};
                auto resolved = insert_dangling_junction(
                    g, *box_by_id.at(wg.endpoints[0].component_id), fresh_junction_id());
                report.inserted_junctions.push_back(resolved.junction);
                report.connections.push_back(std::move(resolved.connection));
                break;
            }
            case GroupCase::Direct: {
                report.connections.push_back(make_connection(wg.endpoints[0], wg.endpoints[1],
                                                             vias, wg.region_id));
                break;
            }
            case GroupCase::OddException: {
                report.exceptions.push_back({wg.region_id, "OddGroup"});
                break;
            }
            case GroupCase::Crossing: {
                PixelCoord center = locate_in_pixels(wg.pixels, kernel);
                auto outcome = split_at(wg, center, kernel, boxes);
                if (!outcome.failure.empty()) {
                    report.exceptions.push_back({wg.region_id, "ArmAmbiguity"});
                    break;
                }

                // Every endpoint's component must sit on exactly one arm.
                std::map<std::string, int> owner;
                bool ambiguous = false;
                for (std::size_t ai = 0; ai < outcome.arms.size() && !ambiguous; ++ai) {
                    for (const auto& id : outcome.arms[ai].components) {
                        if (owner.count(id)) ambiguous = true;
                        owner[id] = static_cast<int>(ai);
                    }
                }
                for (const auto& e : wg.endpoints)
                    if (!owner.count(e.component_id)) ambiguous = true;
                if (ambiguous) {
                    report.exceptions.push_back({wg.region_id, "ArmAmbiguity"});
                    break;
                }

                report.resolved_crossings.push_back(center);
                const std::size_t m = outcome.arms.size() / 2;
                for (std::size_t i = 0; i < m; ++i) {
                    const SplitArm& armA = outcome.arms[i];
                    const SplitArm& armB = outcome.arms[i + m];

                    WorkingGroup merged;
                    merged.region_id = wg.region_id;
                    merged.pixels.reserve(armA.pixels.size() + armB.pixels.size());
                    std::merge(armA.pixels.begin(), armA.pixels.end(), armB.pixels.begin(),
                               armB.pixels.end(), std::back_inserter(merged.pixels));

                    std::unordered_set<std::int64_t> members;
                    for (const auto& p : merged.pixels) members.insert(pack(p));
                    for (const auto& e : wg.glue)
                        if (members.count(pack(e.a)) && members.count(pack(e.b)))
                            merged.glue.push_back(e);
                    merged.glue.push_back({armA.rep, armB.rep, center});

                    for (const auto& e : wg.endpoints) {
                        int arm = owner.at(e.component_id);
                        if (arm == static_cast<int>(i) || arm == static_cast<int>(i + m))
                            merged.endpoints.push_back(e);
                    }
                    queue.push_back(std::move(merged));
                }
                break;
            }
        }
    }

    std::sort(report.connections.begin(), report.connections.end(),
              [](const BinaryConnection& x, const BinaryConnection& y) {
                  return std::tie(x.region_id, x.a.component_id, x.a.contact, x.b.component_id,
                                  x.b.contact) < std::tie(y.region_id, y.a.component_id,
                                                          y.a.contact, y.b.component_id,
                                                          y.b.contact);
              });
    std::sort(report.exceptions.begin(), report.exceptions.end(),
              [](const GroupException& x, const GroupException& y) {
                  return std::tie(x.region_id, x.reason) < std::tie(y.region_id, y.reason);
              });
    report.exceptions.erase(std::unique(report.exceptions.begin(), report.exceptions.end(),
                                        [](const GroupException& x, const GroupException& y) {
                                            return x.region_id == y.region_id &&
                                                   x.reason == y.reason;
                                        }),
                            report.exceptions.end());
    return report;
}

}  // namespace schex
