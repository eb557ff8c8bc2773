#include <gtest/gtest.h>

#include "support/fixtures.hpp"
#include "support/random_net.hpp"

using namespace tpn;
using namespace tpn::testing;

namespace {

const std::string p33 = "pt(p3,t3)";
const std::string p44 = "pt(p4,t4)";

AClass fire_seq(const ANet& net, AClass c, std::initializer_list<const char*> seq) {
  for (const char* t : seq) c = fire_a(net, c, tid(net, t));
  return c;
}

}  // namespace

TEST(ArcClasses, TranslatedInitialClass) {
  const ANet net = translate_p_to_a(load_pnet("diamond.net"));
  EXPECT_EQ(initial_scg_a(net).dom,
            hand_dbm({"pt(p1,t1)", "pt(p2,t2)"}, {{"pt(p1,t1)", "0", 1, 3}, {"pt(p2,t2)", "0", 2, 4}}));
}

TEST(ArcClasses, ScgInterleavingsOfTranslatedNet) {
  const ANet net = translate_p_to_a(load_pnet("diamond.net"));
  const AClass a1 = fire_seq(net, initial_scg_a(net), {"t1", "t2"});
  const AClass a2 = fire_seq(net, initial_scg_a(net), {"t2", "t1"});
  EXPECT_EQ(a1.dom, hand_dbm({p33, p44}, {{p33, "0", 0, 1}, {p44, "0", 2, 2}, {p33, p44, -2, -1}}));
  EXPECT_EQ(a2.dom, hand_dbm({p33, p44}, {{p33, "0", 1, 1}, {p44, "0", 1, 2}, {p33, p44, -1, 0}}));
  EXPECT_FALSE(convex_union(a1.dom, a2.dom).has_value());
}

TEST(ArcClasses, HandWrittenArcNetMatchesTranslation) {
  const ANet hand = load_anet("diamond_arcs.net");
  const ANet tr = translate_p_to_a(load_pnet("diamond.net"));
  EXPECT_TRUE(class_equal(hand, fire_seq(hand, initial_cscg_a(hand), {"t1", "t2"}),
                          fire_seq(tr, initial_cscg_a(tr), {"t1", "t2"})));
}

TEST(ArcClasses, FiringDropsSiblingArcs) {
  const ANet net = load_anet("choice_arcs.net");
  const AClass c0 = initial_cscg_a(net);
  EXPECT_TRUE(firable_a(net, c0, tid(net, "ta")));
  EXPECT_FALSE(firable_a(net, c0, tid(net, "tb")));  // (p1,ta) closes at 2, (p1,tb) opens at 3
  const AClass c1 = fire_a(net, c0, tid(net, "ta"));
  EXPECT_EQ(c1.live(net), (ArcSet{{1, tid(net, "tc")}, {2, tid(net, "td")}}));
  EXPECT_EQ(c1.dom.size(), 2u);
}

TEST(ArcClasses, ErrKillsExpiredArcs) {
  // Both input arcs of ta and tc wait for p2; (p1,ta) expires first.
  const auto net = std::get<ANet>(parse_net(
      "net atpn n\nplace p1 marked\nplace p2 marked\n"
      "trans ta pre p1:[0,2] p2:[3,4] post\ntrans tb pre p1:[5,6] post\n"));
  const AClass c0 = initial_cscg_a(net);
  EXPECT_FALSE(firable_a(net, c0, 0));
  EXPECT_FALSE(firable_a(net, c0, 1));
  const ArcSet dying = err_firable_a(net, c0);
  EXPECT_TRUE(dying.count({0, 0}));
  const AClass c1 = fire_err_class_a(net, c0);
  EXPECT_FALSE(c1.live(net).count({0, 0}));
  EXPECT_FALSE(c1.dom.has("pt(p1,ta)"));
}

TEST(ArcClassProperties, TranslationAgreesWithPlaceClasses) {
  // Holds when every place has an output transition: a token in a place
  // without one has no arc, so the arc-timed net does not bound it.
  std::mt19937_64 rng(51);
  int nets = 0;
  while (nets < 60) {
    const PNet net = random_pnet(rng);
    bool outputs = true;
    for (std::size_t p = 0; p < net.place_count(); ++p) outputs = outputs && !net.outputs(p).empty();
    if (!outputs) continue;
    ++nets;
    const ANet an = translate_p_to_a(net);
    for (int w = 0; w < 3; ++w) {
      PClass c = initial_cscg(net);
      AClass a = initial_cscg_a(an);
      for (int d = 0; d < 6; ++d) {
        std::vector<std::size_t> fs;
        for (std::size_t t = 0; t < net.transition_count(); ++t) {
          ASSERT_EQ(firable(net, c, t), firable_a(an, a, t)) << print_net(net);
          if (firable(net, c, t)) fs.push_back(t);
        }
        const PlaceSet pe = err_firable(net, c);
        PlaceSet ae;
        for (const auto& [p, t] : err_firable_a(an, a)) ae.insert(p);
        ASSERT_EQ(pe, ae) << print_net(net);
        try {
          if (fs.empty()) {
            if (pe.empty()) break;
            c = fire_err_class(net, c);
            a = fire_err_class_a(an, a);
          } else {
            const std::size_t t = fs[rng() % fs.size()];
            c = fire_cscg(net, c, t);
            a = fire_a(an, a, t);
          }
        } catch (const SafetyViolation&) {
          break;
        }
      }
    }
  }
}
