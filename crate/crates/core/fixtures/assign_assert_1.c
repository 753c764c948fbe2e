/* x := 1; assert x = 1. A loop that never exits models a failed assertion. */
void check(void) {
  int x;
  x = 1;
  while (x != 1) ;
}
