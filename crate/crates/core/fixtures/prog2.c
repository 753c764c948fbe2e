/* The same control flow as a loop with an early break. */
void two_state(void) {
  while (pbool(1)) {
    pact(1);
    if (!pbool(1)) {
      pact(2);
    } else {
      break;
    }
  }
}
