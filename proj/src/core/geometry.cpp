#include "teamsim/geometry.hpp"

namespace teamsim {

double normalize_angle(double a) {
    if (a > -kPi && a <= kPi) return a;
    double r = std::remainder(a, kTwoPi);  // [-pi, pi]
    if (r <= -kPi) r += kTwoPi;
    return r;
}

Pose2D make_pose(double x, double y, double theta) { return {x, y, normalize_angle(theta)}; }

Point2 Transform2D::apply(const Point2& p) const {
    const double c = std::cos(rotation);
    const double s = std::sin(rotation);
    return {c * p.x - s * p.y + translation.x, s * p.x + c * p.y + translation.y};
}

Pose2D Transform2D::apply(const Pose2D& p) const {
    const Point2 q = apply(p.position());
    return make_pose(q.x, q.y, p.theta + rotation);
}

Transform2D Transform2D::compose(const Transform2D& inner) const {
    return {normalize_angle(rotation + inner.rotation), apply(inner.translation)};
}

Transform2D Transform2D::inverse() const {
    const double c = std::cos(rotation);
    const double s = std::sin(rotation);
    // R^T (-t)
    return {normalize_angle(-rotation),
            {-(c * translation.x + s * translation.y), -(-s * translation.x + c * translation.y)}};
}

}  // namespace teamsim
