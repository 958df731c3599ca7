#include "teamsim/protocol/alignment.hpp"

#include <cmath>

namespace teamsim::protocol {

Alignment estimate_alignment(std::span<const Correspondence> pairs) {
    if (pairs.size() < 2) throw AlignmentDegenerate("alignment needs at least two correspondences");
    const double n = static_cast<double>(pairs.size());
    Point2 ch, cr;
    for (const auto& c : pairs) {
        ch = ch + c.human;
        cr = cr + c.robot;
    }
    ch = ch * (1.0 / n);
    cr = cr * (1.0 / n);

    double dot = 0, cross = 0, spread = 0;
    for (const auto& c : pairs) {
        const Point2 h = c.human - ch;
        const Point2 r = c.robot - cr;
        dot += h.dot(r);
        cross += h.cross(r);
        spread += h.dot(h);
    }
    if (!(spread > 1e-18 * n * (1.0 + ch.dot(ch))))
        throw AlignmentDegenerate("all human-frame points coincide");

    Alignment out;
    out.transform.rotation = normalize_angle(std::atan2(cross, dot));
    const Transform2D rotate_only{out.transform.rotation, {}};
    out.transform.translation = cr - rotate_only.apply(ch);

    double sq = 0;
    for (const auto& c : pairs) {
        const Point2 e = out.transform.apply(c.human) - c.robot;
        sq += e.dot(e);
    }
    out.residual = std::sqrt(sq / n);
    return out;
}

}  // namespace teamsim::protocol
