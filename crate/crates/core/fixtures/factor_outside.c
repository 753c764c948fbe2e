/* The assignment hoisted above the branch. */
void factor(void) {
  int x;
  x = 42;
  if (pbool(1)) {
    pact(1);
  } else {
    pact(2);
  }
}
