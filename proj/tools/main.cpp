#include <cstdio>

int main() {
  std::printf("outagelab cli placeholder\n");
  return 0;
}
