#include <doctest.h>

#include "jobalign/errors.hpp"
#include "jobalign/text.hpp"

using namespace jobalign;

TEST_CASE("nfkc folds compatibility characters") {
  CHECK(nfkc("ﬁt") == "fit");
  CHECK(nfkc("Ｃhef") == "Chef");          // fullwidth C
  CHECK(nfkc("（ab）") == "(ab)");          // fullwidth parentheses
  CHECK(nfkc("é") == "é");      // e + combining acute -> é
}

TEST_CASE("trim strips unicode whitespace") {
  CHECK(trim("  chef  ") == "chef");
  CHECK(trim("　chef　") == "chef");  // ideographic space
  CHECK(trim(" \t\r\n ") == "");
  CHECK(trim("") == "");
}

TEST_CASE("scalar_count counts code points, not bytes") {
  CHECK(scalar_count("ab") == 2);
  CHECK(scalar_count("软件开发") == 4);
  CHECK(scalar_count("über") == 4);
  CHECK(scalar_count("") == 0);
  CHECK(scalar_count(normalize_text("ｃｈｅｆ")) == 4);  // fullwidth -> ascii
}

TEST_CASE("decode rejects invalid utf-8") {
  CHECK_THROWS_AS(scalar_count("\xff\xfe"), ParseError);
}

TEST_CASE("utf8 round trip") {
  const std::string s = "Bäcker/in 软件 – dev";
  CHECK(encode_utf8(decode_utf8(s)) == s);
}

TEST_CASE("separator classification") {
  CHECK(is_separator(U' '));
  CHECK(is_separator(U'\t'));
  CHECK(is_separator(U','));
  CHECK(is_separator(U'/'));
  CHECK(is_separator(U'('));
  CHECK(is_separator(U'—'));  // em dash
  CHECK(is_separator(U'，'));  // fullwidth comma
  CHECK(is_separator(U'　'));  // ideographic space
  CHECK_FALSE(is_separator(U'a'));
  CHECK_FALSE(is_separator(U'ü'));
  CHECK_FALSE(is_separator(U'软'));
  CHECK_FALSE(is_separator(U'+'));  // math symbol, kept inside words
}

TEST_CASE("cjk classification") {
  CHECK(is_cjk(U'软'));
  CHECK(is_cjk(U'一'));
  CHECK_FALSE(is_cjk(U'a'));
  CHECK_FALSE(is_cjk(U'ä'));
  CHECK_FALSE(is_cjk(U'ア'));  // katakana is not a unified ideograph
}

TEST_CASE("to_lower is locale independent") {
  CHECK(to_lower("CHEF") == "chef");
  CHECK(to_lower("Bäcker") == "bäcker");
  CHECK(to_lower("SEÑOR") == "señor");
  // Root locale: no Turkish dotless-i surprises.
  CHECK(to_lower("TITLE") == "title");
}
