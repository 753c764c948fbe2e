/* An indicator assignment duplicated in both branches. pbool(1) stands for y != 0. */
void factor(void) {
  int x;
  if (pbool(1)) {
    x = 42;
    pact(1);
  } else {
    x = 42;
    pact(2);
  }
}
