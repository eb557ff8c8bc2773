#include <gtest/gtest.h>

#include "support/fixtures.hpp"
#include "support/random_net.hpp"

using namespace tpn;
using namespace tpn::testing;

namespace {

PClass fire_seq(const PNet& net, PClass c, std::initializer_list<const char*> seq) {
  for (const char* t : seq) c = fire(net, c, tid(net, t));
  return c;
}

}  // namespace

TEST(PlaceClasses, InitialClasses) {
  const PNet net = load_pnet("diamond.net");
  EXPECT_EQ(initial_scg(net).dom, hand_dbm({"p1", "p2"}, {{"p1", "0", 1, 3}, {"p2", "0", 2, 4}}));
  EXPECT_EQ(initial_cscg(net).dom, hand_dbm({"p1", "p2"}, {{"p1", "p2", -3, 1}}));
}

TEST(PlaceClasses, ScgFiringOfT1) {
  const PNet net = load_pnet("diamond.net");
  const PClass c = fire_scg(net, initial_scg(net), tid(net, "t1"));
  EXPECT_EQ(c.m, (PlaceSet{1, 2}));
  EXPECT_TRUE(c.dead.empty());
  EXPECT_EQ(c.dom, hand_dbm({"p2", "p3"}, {{"p2", "0", 0, 3}, {"p3", "0", 1, 1}}));
}

TEST(PlaceClasses, ScgInterleavingsDiffer) {
  const PNet net = load_pnet("diamond.net");
  const PClass a1 = fire_seq(net, initial_scg(net), {"t1", "t2"});
  const PClass a2 = fire_seq(net, initial_scg(net), {"t2", "t1"});
  EXPECT_EQ(a1.dom, hand_dbm({"p3", "p4"}, {{"p3", "0", 0, 1}, {"p4", "0", 2, 2}, {"p3", "p4", -2, -1}}));
  EXPECT_EQ(a2.dom, hand_dbm({"p3", "p4"}, {{"p3", "0", 1, 1}, {"p4", "0", 1, 2}, {"p3", "p4", -1, 0}}));
  EXPECT_FALSE(convex_union(a1.dom, a2.dom).has_value());
}

TEST(PlaceClasses, CscgInterleavingsAreConvex) {
  const PNet net = load_pnet("diamond.net");
  const PClass b1 = fire_seq(net, initial_cscg(net), {"t1", "t2"});
  const PClass b2 = fire_seq(net, initial_cscg(net), {"t2", "t1"});
  EXPECT_EQ(b1.dom, hand_dbm({"p3", "p4"}, {{"p3", "p4", -2, -1}}));
  EXPECT_EQ(b2.dom, hand_dbm({"p3", "p4"}, {{"p3", "p4", -1, 0}}));
  const auto u = convex_union(b1.dom, b2.dom);
  ASSERT_TRUE(u.has_value());
  EXPECT_EQ(*u, hand_dbm({"p3", "p4"}, {{"p3", "p4", -2, 0}}));
}

TEST(PlaceClasses, FiringChecksKindAndFirability) {
  const PNet net = load_pnet("diamond.net");
  EXPECT_THROW(fire_scg(net, initial_cscg(net), 0), std::invalid_argument);
  EXPECT_THROW(fire_cscg(net, initial_scg(net), 0), std::invalid_argument);
  EXPECT_THROW(fire(net, initial_scg(net), tid(net, "t3")), NotFirable);
  EXPECT_THROW(class_equal(initial_scg(net), initial_cscg(net)), std::invalid_argument);
  EXPECT_THROW(quotient(initial_cscg(net)), std::invalid_argument);
}

TEST(PlaceClasses, EarlierDeadlineBlocksLaterToken) {
  // p1 must be consumed by 1 and t2 needs p2 at 2 at the earliest.
  const auto net = std::get<PNet>(
      parse_net("net ptpn n\nplace p1 [0,1] marked\nplace p2 [2,3] marked\ntrans t1 pre p1 post\ntrans t2 pre p2 post\n"));
  for (auto kind : {GraphKind::scg, GraphKind::cscg}) {
    const PClass c = initial_class(net, kind);
    EXPECT_TRUE(firable(net, c, 0));
    EXPECT_FALSE(firable(net, c, 1));
  }
}

TEST(PlaceClasses, DeadTokenClass) {
  const PNet net = load_pnet("dead_token.net");
  for (auto kind : {GraphKind::scg, GraphKind::cscg}) {
    const PClass c0 = initial_class(net, kind);
    EXPECT_FALSE(firable(net, c0, 0));
    EXPECT_EQ(err_firable(net, c0), (PlaceSet{0}));
    const PClass c1 = fire_err_class(net, c0);
    EXPECT_EQ(c1.dead, (PlaceSet{0}));
    EXPECT_EQ(c1.m, c0.m);
    EXPECT_EQ(c1.dom.vars(), (std::vector<std::string>{"p2"}));
    if (kind == GraphKind::scg) {
      EXPECT_EQ(c1.dom, hand_dbm({"p2"}, {{"p2", "0", 3, 4}}));
    }
    // No transition has a live preset any more, so the last token dies too.
    const PClass c2 = fire_err_class(net, c1);
    EXPECT_EQ(c2.dead, (PlaceSet{0, 1}));
    EXPECT_THROW(fire_err_class(net, c2), NotFirable);
  }
}

TEST(PlaceClasses, EqualityIgnoresDeadTokens) {
  const PNet net = load_pnet("dead_token.net");
  PClass a = fire_err_class(net, initial_cscg(net));
  PClass b = a;
  b.dead.clear();
  b.m = {1};
  EXPECT_TRUE(class_equal(a, b));
}

TEST(PlaceClasses, PrintsClass) {
  const PNet net = load_pnet("diamond.net");
  EXPECT_EQ(to_string(net, initial_cscg(net)), "(p1+p2; dead=; p1 - p2 <= 1, p2 - p1 <= 3)");
}

namespace {

template <class Visit>
void random_walks(std::uint64_t seed, int nets, Visit&& visit) {
  std::mt19937_64 rng(seed);
  for (int i = 0; i < nets; ++i) {
    const PNet net = random_pnet(rng);
    for (int w = 0; w < 3; ++w) {
      PClass s = initial_scg(net), c = initial_cscg(net);
      for (int d = 0; d < 6; ++d) {
        std::vector<std::size_t> fs;
        for (std::size_t t = 0; t < net.transition_count(); ++t)
          if (firable(net, s, t)) fs.push_back(t);
        if (!visit(net, s, c, fs)) break;
        try {
          if (fs.empty()) {
            if (err_firable(net, s).empty()) break;
            s = fire_err_class(net, s);
            c = fire_err_class(net, c);
          } else {
            const std::size_t t = fs[rng() % fs.size()];
            s = fire_scg(net, s, t);
            c = fire_cscg(net, c, t);
          }
        } catch (const SafetyViolation&) {
          break;
        }
      }
    }
  }
}

}  // namespace

TEST(PlaceClassProperties, QuotientCommutesWithFiring) {
  random_walks(41, 120, [](const PNet& net, const PClass& s, const PClass& c, const std::vector<std::size_t>&) {
    EXPECT_TRUE(class_equal(quotient(s), c)) << to_string(net, s) << " vs " << to_string(net, c);
    for (std::size_t t = 0; t < net.transition_count(); ++t) EXPECT_EQ(firable(net, s, t), firable(net, c, t));
    EXPECT_EQ(err_firable(net, s), err_firable(net, c));
    return true;
  });
}

TEST(PlaceClassProperties, ErrExcludesOrdinaryFiring) {
  random_walks(42, 120, [](const PNet& net, const PClass& s, const PClass& c, const std::vector<std::size_t>& fs) {
    for (const PClass* k : {&s, &c}) {
      const bool err = !err_firable(net, *k).empty();
      EXPECT_FALSE(err && !fs.empty()) << to_string(net, *k);
    }
    return true;
  });
}

TEST(PlaceClassProperties, DeadSetGrowsOnlyThroughErr) {
  std::mt19937_64 rng(43);
  for (int i = 0; i < 120; ++i) {
    const PNet net = random_pnet(rng);
    PClass c = initial_cscg(net);
    for (int d = 0; d < 8; ++d) {
      std::vector<std::size_t> fs;
      for (std::size_t t = 0; t < net.transition_count(); ++t)
        if (firable(net, c, t)) fs.push_back(t);
      try {
        if (fs.empty()) {
          if (err_firable(net, c).empty()) break;
          const PClass n = fire_err_class(net, c);
          EXPECT_TRUE(std::includes(n.dead.begin(), n.dead.end(), c.dead.begin(), c.dead.end()));
          EXPECT_GT(n.dead.size(), c.dead.size());
          EXPECT_EQ(n.m, c.m);
          c = n;
        } else {
          const PClass n = fire_cscg(net, c, fs[rng() % fs.size()]);
          for (auto p : n.dead) EXPECT_TRUE(c.dead.count(p)) << print_net(net);
          c = n;
        }
      } catch (const SafetyViolation&) {
        break;
      }
    }
  }
}
