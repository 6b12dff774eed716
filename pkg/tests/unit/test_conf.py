import pytest

from qnet.conf import default_settings, settings


class TestSettingsLookup:
    def test_default_value(self):
        assert settings.QNET_NULLSPACE_MAX_DIM == default_settings.QNET_NULLSPACE_MAX_DIM

    def test_override_is_restored(self):
        with settings.override(QNET_BRANCH_CUTOFF=1e-6):
            assert settings.QNET_BRANCH_CUTOFF == 1e-6
        assert settings.QNET_BRANCH_CUTOFF == default_settings.QNET_BRANCH_CUTOFF

    def test_nested_overrides(self):
        with settings.override(QNET_DEFAULT_JOBS=2):
            with settings.override(QNET_DEFAULT_JOBS=4):
                assert settings.QNET_DEFAULT_JOBS == 4
            assert settings.QNET_DEFAULT_JOBS == 2

    def test_unknown_override_rejected(self):
        with pytest.raises(AttributeError, match="Unknown setting"):
            with settings.override(QNET_NOT_A_SETTING=1):
                pass

    def test_unknown_setting(self):
        with pytest.raises(AttributeError):
            _ = settings.QNET_NOT_A_SETTING

    @pytest.mark.parametrize(
        ("raw", "expected"),
        [
            ("16", 16),
            ("1e-9", 1e-9),
            ("false", False),
            ('"exact"', "exact"),
            ("exact", "exact"),
        ],
    )
    def test_environment_wins(self, monkeypatch, raw, expected):
        monkeypatch.setenv("QNET_DIRECTIONALITY_METHOD", raw)
        with settings.override(QNET_DIRECTIONALITY_METHOD="ode"):
            assert settings.QNET_DIRECTIONALITY_METHOD == expected
