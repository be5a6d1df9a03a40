#include <doctest.h>

#include <set>

#include "schex/schema.hpp"
#include "test_util.hpp"

using namespace schex;

namespace {

const PinWindow& window_for(const std::vector<PinWindow>& wins, const std::string& role) {
    for (const auto& w : wins)
        if (w.role == role) return w;
    REQUIRE(false);
    return wins.front();
}

}  // namespace

TEST_CASE("canonical nmos4 windows") {
    auto wins = pin_windows(ComponentCategory::Nmos4, Orientation::R0);
    REQUIRE(wins.size() == 4);
    CHECK(window_for(wins, "drain").angle_deg == 90);
    CHECK(window_for(wins, "gate").angle_deg == 180);
    CHECK(window_for(wins, "source").angle_deg == 270);
    CHECK(window_for(wins, "body").angle_deg == 0);
    for (const auto& w : wins) CHECK(w.half_width_deg == 44);

    auto r180 = pin_windows(ComponentCategory::Nmos4, Orientation::R180);
    CHECK(window_for(r180, "drain").angle_deg == 270);
    CHECK(window_for(r180, "gate").angle_deg == 0);
    CHECK(window_for(r180, "source").angle_deg == 90);
    CHECK(window_for(r180, "body").angle_deg == 180);
}

TEST_CASE("resistor default is vertical") {
    auto wins = pin_windows(ComponentCategory::Resistor, Orientation::R0);
    REQUIRE(wins.size() == 2);
    CHECK(window_for(wins, "t1").angle_deg == 90);
    CHECK(window_for(wins, "t2").angle_deg == 270);
}

TEST_CASE("every integer degree falls in at most one window") {
    for (auto cat : all_categories()) {
        for (auto o : all_orientations()) {
            auto wins = pin_windows(cat, o);
            CHECK(wins.size() == terminal_roles(cat).size());
            for (int deg = 0; deg < 360; ++deg) {
                int hits = 0;
                for (const auto& w : wins)
                    if (w.contains(deg)) ++hits;
                CHECK(hits <= 1);
            }
        }
    }
}

TEST_CASE("rotation and mirror laws for pin windows") {
    for (auto cat : all_categories()) {
        auto base = pin_windows(cat, Orientation::R0);
        auto by90 = pin_windows(cat, Orientation::R90);
        for (std::size_t i = 0; i < base.size(); ++i) {
            CHECK(by90[i].role == base[i].role);
            CHECK(by90[i].angle_deg == doctest::Approx(normalize_deg(base[i].angle_deg + 90)));
        }
        auto mr90 = pin_windows(cat, Orientation::MR90);
        for (std::size_t i = 0; i < base.size(); ++i)
            CHECK(mr90[i].angle_deg ==
                  doctest::Approx(normalize_deg(180.0 - base[i].angle_deg + 90)));
    }
}

TEST_CASE("orientation composition is closed and has identity") {
    for (auto a : all_orientations()) {
        CHECK(compose(a, Orientation::R0) == a);
        CHECK(compose(Orientation::R0, a) == a);
        for (auto b : all_orientations()) {
            auto c = compose(a, b);
            CHECK(static_cast<int>(c) >= 0);
            CHECK(static_cast<int>(c) < 8);
        }
    }
    // Mirror twice cancels.
    CHECK(compose(Orientation::MR0, Orientation::MR0) == Orientation::R0);
    CHECK(compose(Orientation::R90, Orientation::R90) == Orientation::R180);
}

TEST_CASE("annotation round trip") {
    AnnotationFile ann;
    ann.image = "page3.png";
    ann.page_width = 200;
    ann.page_height = 100;
    ann.boxes.push_back(testutil::box("m1", ComponentCategory::Nmos4, 10, 10, 50, 70));
    ann.boxes.push_back(
        testutil::box("r1", ComponentCategory::Resistor, 60, 10, 90, 40, Orientation::R90));

    std::string text = save_annotations(ann);
    AnnotationFile back = load_annotations(text);
    CHECK(back.image == ann.image);
    CHECK(back.page_width == ann.page_width);
    CHECK(back.page_height == ann.page_height);
    REQUIRE(back.boxes.size() == 2);
    CHECK(back.boxes[0].id == "m1");
    CHECK(back.boxes[0].category == ComponentCategory::Nmos4);
    CHECK(back.boxes[1].orientation == Orientation::R90);
    CHECK(save_annotations(back) == text);
}

TEST_CASE("annotation validation failures") {
    auto doc = [](const std::string& boxes) {
        return std::string(R"({"image":"p.png","page_width":100,"page_height":100,"boxes":[)") +
               boxes + "]}";
    };
    std::string good =
        R"({"id":"a","category":"nmos4","orientation":"R0","x0":10,"y0":10,"x1":50,"y1":70})";

    SUBCASE("one valid box decodes") {
        auto ann = load_annotations(doc(good));
        REQUIRE(ann.boxes.size() == 1);
        CHECK(ann.boxes[0].category == ComponentCategory::Nmos4);
    }
    SUBCASE("overlapping boxes conflict") {
        std::string other =
            R"({"id":"b","category":"resistor","orientation":"R0","x0":40,"y0":40,"x1":80,"y1":90})";
        CHECK_THROWS_AS(load_annotations(doc(good + "," + other)), AnnotationConflict);
    }
    SUBCASE("duplicate ids conflict") {
        std::string other =
            R"({"id":"a","category":"resistor","orientation":"R0","x0":60,"y0":10,"x1":80,"y1":30})";
        CHECK_THROWS_AS(load_annotations(doc(good + "," + other)), AnnotationConflict);
    }
    SUBCASE("unknown category names the record") {
        std::string bad =
            R"({"id":"z9","category":"nmoss","orientation":"R0","x0":1,"y0":1,"x1":5,"y1":5})";
        try {
            load_annotations(doc(bad));
            FAIL("expected ParseError");
        } catch (const ParseError& e) {
            CHECK(std::string(e.what()).find("z9") != std::string::npos);
            CHECK(std::string(e.what()).find("nmoss") != std::string::npos);
        }
    }
    SUBCASE("unknown fields are rejected") {
        CHECK_THROWS_AS(
            load_annotations(
                R"({"image":"p","page_width":9,"page_height":9,"boxes":[],"extra":1})"),
            ParseError);
    }
    SUBCASE("out-of-page bounds are rejected") {
        std::string bad =
            R"({"id":"a","category":"gnd","orientation":"R0","x0":90,"y0":90,"x1":110,"y1":99})";
        CHECK_THROWS_AS(load_annotations(doc(bad)), ParseError);
    }
    SUBCASE("malformed JSON") { CHECK_THROWS_AS(load_annotations("{nope"), ParseError); }
}

TEST_CASE("category metadata") {
    CHECK(terminal_roles(ComponentCategory::Nmos4) ==
          std::vector<std::string>{"drain", "gate", "source", "body"});
    CHECK(terminal_roles(ComponentCategory::Npn) ==
          std::vector<std::string>{"collector", "base", "emitter"});
    CHECK(is_symmetric(ComponentCategory::Resistor));
    CHECK(is_symmetric(ComponentCategory::Capacitor));
    CHECK(is_symmetric(ComponentCategory::Inductor));
    CHECK_FALSE(is_symmetric(ComponentCategory::Vsource));
    CHECK_FALSE(is_symmetric(ComponentCategory::Diode));
    CHECK_FALSE(emits_card(ComponentCategory::Gnd));
    CHECK(emits_card(ComponentCategory::Diode));
    CHECK(all_categories().size() == 16);
}
