"""Launcher for automated tests"""

import pytest

if __name__ == "__main__":
    pytest.main()
