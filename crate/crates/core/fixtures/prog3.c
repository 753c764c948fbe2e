/* The same control flow as a single loop driven by an indicator variable. */
void two_state(void) {
  int x = 1;
  while (x != 0) {
    if (x == 1 && pbool(1)) {
      pact(1);
      x = 2;
    } else if (x == 2 && !pbool(1)) {
      pact(2);
      x = 1;
    } else {
      x = 0;
    }
  }
}
