#ifndef CROSSRES_UNICODE_H_
#define CROSSRES_UNICODE_H_

#include <string>
#include <string_view>

namespace crossres::unicode {

// Decodes UTF-8 into Unicode scalar values. Ill-formed sequences become
// U+FFFD, so arbitrary bytes are accepted.
std::u32string decode_utf8(std::string_view bytes);

std::string encode_utf8(std::u32string_view text);

// Round-trips through decode/encode; the result is always valid UTF-8.
std::string sanitize_utf8(std::string_view bytes);

bool is_whitespace(char32_t c);

}  // namespace crossres::unicode

#endif  // CROSSRES_UNICODE_H_
