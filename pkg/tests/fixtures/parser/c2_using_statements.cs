using System.Data;
// using System.Net.Http;
/* using System.Threading; */

namespace Acme {
    class C2 {
        void M() {
            using (var conn = Open()) { }
            using var file = File.OpenRead("x");
        }
    }
}
