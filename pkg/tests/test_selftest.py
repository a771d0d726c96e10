from srtmkit.schemas.models import CheckStatus
from srtmkit.services.selftest import run_selftest

CHECKS = ["conditional-product", "empty-sum", "path-sum", "wqbf-pruning", "limrec", "semiring-laws"]


class TestSelftest:

    @staticmethod
    def test_all_checks_pass():
        reports = run_selftest(seed=5)
        assert [r.name for r in reports] == CHECKS
        for report in reports:
            assert report.status == CheckStatus.PASS, (report.name, report.message)
            assert int(report.left_value) > 0

    @staticmethod
    def test_missing_corpus_is_reported(tmp_path):
        reports = {r.name: r for r in run_selftest(seed=5, directory=str(tmp_path))}
        assert reports["conditional-product"].status == CheckStatus.FAIL
        assert "FormatError" in reports["conditional-product"].message
        assert reports["semiring-laws"].status == CheckStatus.PASS
