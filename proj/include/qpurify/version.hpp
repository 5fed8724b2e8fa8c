#ifndef QPURIFY_VERSION_HPP
#define QPURIFY_VERSION_HPP

namespace qpurify {

inline constexpr const char* kVersion = "0.1.0";
// Version of the JSON record / fixture formats emitted by the CLI.
inline constexpr int kRecordFormatVersion = 1;

}  // namespace qpurify

#endif
