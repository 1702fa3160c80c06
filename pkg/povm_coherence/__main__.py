import sys

from povm_coherence.cli.main import main

sys.exit(main())
