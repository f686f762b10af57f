/*
 * Copyright 2026 The Fwchain Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *   http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "fwchain/bootloader.hpp"

#if defined(__unix__) || defined(__APPLE__)

#include <fcntl.h>
#include <poll.h>
#include <termios.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>

namespace fwchain::bootldr {

namespace {

speed_t baud_constant(int baud) {
  switch (baud) {
    case 9600: return B9600;
    case 19200: return B19200;
    case 38400: return B38400;
    case 57600: return B57600;
    case 115200: return B115200;
    default: return B115200;
  }
}

}  // namespace

Result<std::unique_ptr<SerialLink>> SerialLink::open(const std::string& port, int baud) {
  int fd = ::open(port.c_str(), O_RDWR | O_NOCTTY | O_NONBLOCK);
  if (fd < 0)
    return err(Errc::io_failure, "cannot open " + port + ": " + std::strerror(errno));

  termios tio{};
  if (tcgetattr(fd, &tio) != 0) {
    ::close(fd);
    return err(Errc::io_failure, "tcgetattr failed on " + port);
  }
  cfmakeraw(&tio);
  // The bootloader convention uses even parity, 8 data bits, 1 stop bit.
  tio.c_cflag |= PARENB | CS8 | CLOCAL | CREAD;
  tio.c_cflag &= ~(PARODD | CSTOPB);
  tio.c_cc[VMIN] = 0;
  tio.c_cc[VTIME] = 0;
  cfsetispeed(&tio, baud_constant(baud));
  cfsetospeed(&tio, baud_constant(baud));
  if (tcsetattr(fd, TCSANOW, &tio) != 0) {
    ::close(fd);
    return err(Errc::io_failure, "tcsetattr failed on " + port);
  }
  tcflush(fd, TCIOFLUSH);
  return std::unique_ptr<SerialLink>(new SerialLink(fd));
}

SerialLink::~SerialLink() {
  if (fd_ >= 0) ::close(fd_);
}

void SerialLink::write(ByteView data) {
  std::size_t off = 0;
  while (off < data.size()) {
    ssize_t n = ::write(fd_, data.data() + off, data.size() - off);
    if (n < 0) {
      if (errno == EINTR || errno == EAGAIN) continue;
      return;
    }
    off += std::size_t(n);
  }
  tcdrain(fd_);
}

int SerialLink::read_byte(int timeout_ms) {
  pollfd pfd{fd_, POLLIN, 0};
  int ready = ::poll(&pfd, 1, timeout_ms);
  if (ready <= 0) return -1;
  std::uint8_t b = 0;
  ssize_t n = ::read(fd_, &b, 1);
  return n == 1 ? int(b) : -1;
}

}  // namespace fwchain::bootldr

#else

namespace fwchain::bootldr {

Result<std::unique_ptr<SerialLink>> SerialLink::open(const std::string& port, int) {
  return err(Errc::io_failure, "serial ports unsupported on this platform: " + port);
}
SerialLink::~SerialLink() = default;
void SerialLink::write(ByteView) {}
int SerialLink::read_byte(int) { return -1; }

}  // namespace fwchain::bootldr

#endif
