import shutil

import pytest

from dnszipf.exceptions import FixtureError
from dnszipf.services.fixture_service import FixtureService

from .conftest import FIXTURES


@pytest.fixture
def fixture_copy(tmp_path):
    root = tmp_path / "fixtures"
    shutil.copytree(FIXTURES, root)
    return root


def test_bundled_fixtures_match_manifest():
    manifest = FixtureService.capture_fixture_manifest(FIXTURES)
    assert manifest.root == FIXTURES
    assert len(manifest.fixtures) >= 10
    assert {"popular_domains", "legit_subdomains", "random_domains", "tunnel_pcap", "published_table"} <= manifest.classes


def test_by_class():
    manifest = FixtureService.capture_fixture_manifest(FIXTURES, verify=False)
    tunnels = manifest.by_class("tunnel_pcap")
    assert sorted(entry.codec for entry in tunnels) == ["base32", "base64_dns", "hex"]
    assert manifest.get("popular_domains.txt").entries == 1340
    with pytest.raises(KeyError):
        manifest.get("nope.txt")


def test_tampered_fixture(fixture_copy):
    target = fixture_copy / "random_100_seed7.txt"
    target.write_text(target.read_text().replace("s6vhat-bwc", "s6vhat-bwd"))

    with pytest.raises(FixtureError, match="random_100_seed7.txt") as e:
        FixtureService.capture_fixture_manifest(fixture_copy)
    assert e.value.path == "random_100_seed7.txt"


def test_missing_fixture(fixture_copy):
    (fixture_copy / "tunnel_hex.pcap").unlink()
    with pytest.raises(FixtureError, match="tunnel_hex.pcap"):
        FixtureService.capture_fixture_manifest(fixture_copy)
    # structure still loads without the digest pass
    assert FixtureService.capture_fixture_manifest(fixture_copy, verify=False).get("tunnel_hex.pcap")


def test_unreadable_manifest(tmp_path):
    (tmp_path / "manifest.json").write_text("{not json")
    with pytest.raises(FixtureError, match="manifest"):
        FixtureService.capture_fixture_manifest(tmp_path)


def test_fixture_path():
    assert FixtureService.fixture_path("x.fp", FIXTURES) == FIXTURES / "x.fp"
