#pragma once

#include <optional>
#include <string>
#include <string_view>

namespace feedenrich {

// Content of <meta name="author">, else the beautified slug of the first
// link whose path contains /author/, /authors/, /people/, /user/, /users/,
// /editor/ or /editors/ followed by a non-numeric slug.
std::optional<std::string> extract_author(std::string_view html, std::string_view base);

// "christopher-bishop" -> "Christopher Bishop". Throws std::invalid_argument
// for an empty or separator-only slug.
std::string beautify_slug(std::string_view slug);

// The slug following an author-profile path prefix, if `path` has one.
std::optional<std::string> author_slug_from_path(std::string_view path);

}  // namespace feedenrich
