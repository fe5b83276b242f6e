require('fs').hiddenProperty;
