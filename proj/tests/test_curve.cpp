#include "oharaknot/curve.hpp"
#include "oharaknot/io.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

using namespace oknot;

namespace {

// Brute-force distortion: arclength by walking edges, chord by definition.
double brute_distortion(const std::vector<Vec3>& x) {
  const std::size_t n = x.size();
  double length = 0.0;
  for (std::size_t j = 0; j < n; ++j) length += (x[(j + 1) % n] - x[j]).norm();
  double best = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    double walk = 0.0;
    for (std::size_t k = j + 1; k < n; ++k) {
      walk += (x[k] - x[k - 1]).norm();
      const double d = std::min(walk, length - walk);
      best = std::max(best, d / (x[k] - x[j]).norm());
    }
  }
  return best;
}

std::vector<Vec3> regular_polygon(std::size_t n, double radius = 1.0) {
  std::vector<Vec3> v(n);
  for (std::size_t j = 0; j < n; ++j) {
    const double t = 2.0 * kPi * double(j) / double(n);
    v[j] = Vec3(radius * std::cos(t), radius * std::sin(t), 0.0);
  }
  return v;
}

}  // namespace

TEST(PolyCurve, RejectsDegenerateInput) {
  EXPECT_THROW(PolyCurve({Vec3(0, 0, 0), Vec3(1, 0, 0)}, 2), Error);
  try {
    PolyCurve({Vec3(0, 0, 0), Vec3(1, 0, 0), Vec3(1, 0, 0), Vec3(0, 1, 0)}, 2);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::InvalidCurve);
  }
  try {
    PolyCurve({Vec3(0, 0, 0), Vec3(1, 0, 0), Vec3(0, 0, 0), Vec3(0, 1, 0)}, 2);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::SelfIntersection);
  }
  EXPECT_THROW(PolyCurve({Vec3(0, 0, 0), Vec3(1, 0, 0), Vec3(0, 1, 0.5)}, 2), Error);
  EXPECT_THROW(PolyCurve({Vec3(0, 0, 0), Vec3(NAN, 0, 0), Vec3(0, 1, 0)}, 3), Error);
}

TEST(ArcTable, IntrinsicDistanceOfSquare) {
  const PolyCurve sq({Vec3(0, 0, 0), Vec3(1, 0, 0), Vec3(1, 1, 0), Vec3(0, 1, 0)}, 2);
  const ArcTable arc = build_arc_table(sq);
  EXPECT_DOUBLE_EQ(arc.length, 4.0);
  EXPECT_DOUBLE_EQ(intrinsic_dist(arc, 0, 1), 1.0);
  EXPECT_DOUBLE_EQ(intrinsic_dist(arc, 0, 2), 2.0);
  EXPECT_DOUBLE_EQ(intrinsic_dist(arc, 0, 3), 1.0);
  EXPECT_DOUBLE_EQ(intrinsic_dist(arc, 3, 0), 1.0);
  for (double w : arc.weights) EXPECT_DOUBLE_EQ(w, 1.0);
}

TEST(Distortion, MatchesBruteForce) {
  for (auto kind : {CurveKind::Circle, CurveKind::Square, CurveKind::Stadion, CurveKind::Wavy}) {
    const PolyCurve c = generate({kind}, 120);
    EXPECT_NEAR(distortion(c), brute_distortion(c.vertices()), 1e-12) << int(kind);
  }
}

TEST(Distortion, ReferenceCurves) {
  // inscribed regular polygon: antipodal vertices give (N/2 edges)/(diameter)
  const std::size_t n = 1000;
  const double edge = 2.0 * std::sin(kPi / double(n));
  EXPECT_NEAR(distortion(generate({CurveKind::Circle}, n)), 0.5 * double(n) * edge / 2.0, 1e-12);
  EXPECT_NEAR(distortion(generate({CurveKind::Square}, n)), 2.0, 1e-2);
  EXPECT_NEAR(distortion(generate({CurveKind::Stadion}, n)), kPi, 1e-2);
  const PolyCurve inv = sphere_inversion(generate({CurveKind::Square}, n), Vec3::Zero(), 1.0);
  EXPECT_GE(distortion(inv), kPi / std::sqrt(2.0) - 1e-2);
}

TEST(Distortion, ThreadCountDoesNotChangeResult) {
  const PolyCurve c = generate({CurveKind::Wavy}, 777);
  const double one = distortion(c, {1});
  EXPECT_EQ(one, distortion(c, {3}));
  EXPECT_EQ(one, distortion(c, {8}));
}

TEST(Distortion, InvariantUnderSimilarity) {
  const PolyCurve c = generate({CurveKind::Stadion}, 400);
  const Eigen::Matrix3d rot = Eigen::AngleAxisd(0.7, Vec3(1, 2, 3).normalized()).toRotationMatrix();
  const double b = distortion(c);
  EXPECT_NEAR(distortion(scaled(c, 1e3)), b, 1e-12 * b);
  EXPECT_NEAR(distortion(transformed(c, rot, Vec3(4, -1, 2))), b, 1e-12 * b);
  EXPECT_NEAR(distortion(reversed(c)), b, 1e-12 * b);
}

TEST(Generate, SquareContainsCorners) {
  const PolyCurve sq = generate({CurveKind::Square}, 8);
  for (const Vec3& corner : {Vec3(-1, -1, 0), Vec3(1, -1, 0), Vec3(1, 1, 0), Vec3(-1, 1, 0)}) {
    bool found = false;
    for (const auto& v : sq.vertices()) found = found || (v - corner).norm() < 1e-15;
    EXPECT_TRUE(found);
  }
}

TEST(Generate, StadionGeometry) {
  const PolyCurve st = generate({CurveKind::Stadion}, 1000);
  const ArcTable arc = build_arc_table(st);
  EXPECT_NEAR(arc.length, 4.0 * kPi, 1e-4);
  for (const auto& v : st.vertices()) {
    const double dx = std::max(0.0, std::abs(v.x()) - 0.5 * kPi);
    EXPECT_NEAR(std::hypot(dx, v.y()), 1.0, 1e-12);
  }
}

TEST(Generate, CircleMatchesRegularPolygon) {
  const PolyCurve c = generate({CurveKind::Circle}, 64);
  const auto ref = regular_polygon(64);
  for (std::size_t j = 0; j < 64; ++j) EXPECT_LT((c.vertices()[j] - ref[j]).norm(), 1e-15);
}

TEST(Generate, ArclengthSamplingIsNearlyUniform) {
  const PolyCurve w = generate({CurveKind::Wavy}, 500);
  double lo = 1e300, hi = 0.0;
  for (std::size_t j = 0; j < w.size(); ++j) {
    lo = std::min(lo, w.edge_length(j));
    hi = std::max(hi, w.edge_length(j));
  }
  // equal arcs, chords differ by the curvature variation
  EXPECT_LT((hi - lo) / hi, 5e-3);
}

TEST(Generate, EquilateralSampling) {
  const auto f = [](double t) {
    const double r = 1.0 + 0.2 * std::cos(2 * t) + 0.15 * std::sin(3 * t);
    return Vec3(r * std::cos(t), r * std::sin(t), 0.3 * std::sin(t));
  };
  const PolyCurve c = sample_equilateral(f, 300, 3);
  double lo = 1e300, hi = 0.0;
  for (std::size_t j = 0; j < c.size(); ++j) {
    lo = std::min(lo, c.edge_length(j));
    hi = std::max(hi, c.edge_length(j));
  }
  EXPECT_LT((hi - lo) / hi, 1e-12);
}

TEST(Inversion, InvolutionAndSingularity) {
  const PolyCurve sq = generate({CurveKind::Square}, 40);
  const PolyCurve back = sphere_inversion(sphere_inversion(sq, Vec3(0.1, 0.2, 0), 1.5), Vec3(0.1, 0.2, 0), 1.5);
  for (std::size_t j = 0; j < sq.size(); ++j) EXPECT_LT((back.vertices()[j] - sq.vertices()[j]).norm(), 1e-13);
  try {
    sphere_inversion(sq, Vec3(1, -1, 0), 1.0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::InversionSingularity);
  }
  // center inside an edge but not at a vertex
  EXPECT_THROW(sphere_inversion(sq, Vec3(1, 0.03, 0), 1.0), Error);
  // points on the unit circle are fixed
  const PolyCurve c = generate({CurveKind::Circle}, 50);
  const PolyCurve ci = sphere_inversion(c, Vec3::Zero(), 1.0);
  for (std::size_t j = 0; j < c.size(); ++j) EXPECT_LT((ci.vertices()[j] - c.vertices()[j]).norm(), 1e-15);
  EXPECT_EQ(sphere_inversion(c, Vec3(0, 0, 0.5), 1.0).dim(), 3);
}

TEST(TotalCurvature, PolygonsTurnOnce) {
  EXPECT_NEAR(total_curvature(generate({CurveKind::Circle}, 100)), 2 * kPi, 1e-12);
  EXPECT_NEAR(total_curvature(generate({CurveKind::Square}, 100)), 2 * kPi, 1e-12);
  // the wavy circle with amp 0.3, k 5 has inflections: more than one turn
  EXPECT_GT(total_curvature(generate({CurveKind::Wavy}, 1000)), 2 * kPi + 1.0);
}

TEST(Io, RoundTripKeepsEveryBit) {
  const PolyCurve w = generate({CurveKind::Wavy}, 97);
  std::stringstream s;
  write_curve(w, s);
  const PolyCurve back = parse_curve(s);
  ASSERT_EQ(back.size(), w.size());
  EXPECT_EQ(back.dim(), 2);
  for (std::size_t j = 0; j < w.size(); ++j) EXPECT_EQ(back.vertices()[j], w.vertices()[j]);
}

TEST(Io, ParsesCommentsAndCommas) {
  std::stringstream s("# header\n0, 0, 0\n1,0,0\n\n  0 1 0.5\n");
  const PolyCurve c = parse_curve(s);
  EXPECT_EQ(c.size(), 3u);
  EXPECT_EQ(c.dim(), 3);
  EXPECT_DOUBLE_EQ(c.vertices()[2].z(), 0.5);
}

TEST(Io, RejectsMalformedRows) {
  std::stringstream bad("0 0\n1 x\n0 1\n");
  EXPECT_THROW(parse_curve(bad), Error);
  std::stringstream mixed("0 0\n1 0 0\n0 1\n");
  EXPECT_THROW(parse_curve(mixed), Error);
  std::stringstream few("0 0\n1 0\n");
  EXPECT_THROW(parse_curve(few), Error);
}
